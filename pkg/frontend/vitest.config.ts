import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    environmentMatchGlobs: [["test/loader.test.ts", "happy-dom"]],
    environmentOptions: {
      happyDOM: {
        // fallback script elements carry src URLs that only resolve on a
        // real site; the DOM env must not chase them during tests
        settings: { disableJavaScriptFileLoading: true },
      },
    },
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
