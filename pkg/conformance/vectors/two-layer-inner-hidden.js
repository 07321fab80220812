//JSSignature:YF5+53mq7Ly4P4c+joXdzlMaec/GKGjP1AiJgaSgAWOgxemKw1uidZBRfQTK+QYSE+iCaO/W7EwB8Danlw+q3mRkBjksXhvL2mS5mBcc08sHjstimZfgali+D8cTQ7OuiUCbaFcRan4+KJ5h8dryePhbXUZAyNDgqtSUwsUVtlRyKTKKStPeowKRIMUX8H5qpC+Rs6BRM/gfJ/RoFlSIFpYvDvAeFWGZlQ4w0BnYVSV9LJNmHQ+rZCMLv92zI2zBz/Cp+5+F3uDKnKf85AeovZhVsEk7V7Mx8i3UqdLYoOEZf/6w340yrPoIwEcmQCRFLbPm/3gIXksDrCAgyrBnIA==
//JSSignature:jeWi2I5KQtE2aMICBXGBvbcQKYmCGZa09pAJrQ5JQI7v/xBsFOb2bQhuQzVHF3bIJGc5dG632on3FQhdJFNKVJpN8BR14HOKIRWLCi4Mp9CkSy/r2z0klELyCQchIWaAuobopOZlHhnNq6jzDuHAqp61VLfgS2sQkrxsuE4cbb2WnBLG/cKLo5nVmebULEBHY1bv7sQY44YWJCNOHUNtAEcErKgASvORr8fe4Jo6JHvYiwK7+XGyXJ6DM5MA/7jCgL1ju0J//MGWw47jl6CHPOWZj16QWTifuQxRMc2rBjAkWgZlCesEOF5UdGGbA/72jHdm2tWB7lZ088UHV63f9w==
/*! demo-widget 1.0 */
(function (root) {
  root.demoWidget = { version: '1.0', answer: function () { return 42; } };
})(globalThis);
