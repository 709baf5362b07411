import { defineConfig } from "vitest/config";

// Integration tests train a model and spawn the service, so the budget is
// generous; unit tests finish in milliseconds regardless.
export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
