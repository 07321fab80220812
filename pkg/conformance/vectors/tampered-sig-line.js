//JSSignature:jlUSBBCZB7+jR6Am6nMOuPFMvUAPp0gq1y1FzqB7VPdpnFhiMNEVR+UIWWGGvHEf/xvFpiN1BYRLvyuoPEWV2u986+49Z0qjNCrE9kLsD5/MGKh+eQLeOtufJODVAjYXQgPqnnk4sX1sGZpH+gzI+8XZjd6XQcZN4vKrAw35FspX4rifDrc/xslPrIvOZEM097kaSU+TmJTABWvUz1wvdZFrzeSNQXEuM/h6r48OM+AmneFKC7FPe/yIv2xLIxf16h1HGYva3l8LmlHeUmfqr4X28/3X5U9Gnp3S5CjO8xAqsWLg4ox0o9lhFbvJieN1Qesv3R5Bzd9QEFe35fX4FA==
/*! demo-widget 1.0 */
(function (root) {
  root.demoWidget = { version: '1.0', answer: function () { return 42; } };
})(globalThis);
