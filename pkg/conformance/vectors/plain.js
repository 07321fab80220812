/*! demo-widget 1.0 */
(function (root) {
  root.demoWidget = { version: '1.0', answer: function () { return 42; } };
})(globalThis);
