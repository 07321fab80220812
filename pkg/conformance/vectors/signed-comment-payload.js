//JSSignature:mhER76POHtzW+jfVYYIUXVRUw6zpFLRA6zvIzv3OnHKJebZswS3PiPQXQulw0OKkEfoO2D8E5Im0rWGCWNvIj8dYDT9oTRSvv4b5ZqVZ4Pl5ve2pcxiF2kIZE8ZC65SZkwa4rX6oYnJjU/aETzsLHlgEGD3wy8h242T1EORNrMhz3WP2ncoSVK+FtxoHFL85s1fS4OmOPv/8h734JQYKNF95hXzaTl1cbafhm2t6heTBJ9nxzEO2tVMnQgyZNmWdFgYzZcodLNDsATEwKWjB/txBhEyfeFz3zY3DcWyJOPMPKg+4DISlObWBcVdcPoO+GZp0CpVjoyloLFrXhsPonA==
// looks like a comment
/*! demo-widget 1.0 */
(function (root) {
  root.demoWidget = { version: '1.0', answer: function () { return 42; } };
})(globalThis);
