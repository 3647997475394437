import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    // during development the authoring service runs separately;
    // in production `embodiment serve --frontend frontend/dist` serves
    // the bundle and the API from one origin
    proxy: {
      "/graph": "http://127.0.0.1:8080",
      "/clips": "http://127.0.0.1:8080",
      "/validate": "http://127.0.0.1:8080",
      "/expand": "http://127.0.0.1:8080",
      "/plan": "http://127.0.0.1:8080",
      "/sample": "http://127.0.0.1:8080",
      "/generate": "http://127.0.0.1:8080",
    },
  },
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
