//JSSignature:jeWi2I5KQtE2aMICBXGBvbcQKYmCGZa09pAJrQ5JQI7v/xBsFOb2bQhuQzVHF3bIJGc5dG632on3FQhdJFNKVJpN8BR14HOKIRWLCi4Mp9CkSy/r2z0klELyCQchIWaAuobopOZlHhnNq6jzDuHAqp61VLfgS2sQkrxsuE4cbb2WnBLG/cKLo5nVmebULEBHY1bv7sQY44YWJCNOHUNtAEcErKgASvORr8fe4Jo6JHvYiwK7+XGyXJ6DM5MA/7jCgL1ju0J//MGWw47jl6CHPOWZj16QWTifuQxRMc2rBjAkWgZlCesEOF5UdGGbA/72jHdm2tWB7lZ088UHV63f9w==
/*! demo-widget 1.0 */
(function (root) {
  root.demoWidget = { version: '1.0', answer: function () { return 42; } };
})(globalThis);
