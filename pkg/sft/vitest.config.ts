import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['tests/**/*.test.ts'],
    // The smoke-improvement test trains for ~4000 optimizer steps on CPU.
    testTimeout: 900_000,
    hookTimeout: 60_000,
  },
});
