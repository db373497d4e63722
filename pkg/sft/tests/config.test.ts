import { describe, expect, it } from 'vitest';
import {
  ConfigMismatch,
  ZeroBatch,
  computeTrainingSteps,
  parseTrainingConfig,
} from '../src/config';
import { REFERENCE_CONFIG } from './helpers';

describe('computeTrainingSteps', () => {
  it('drops the last partial batch', () => {
    expect(computeTrainingSteps(256, 32, 1)).toBe(8);
    expect(computeTrainingSteps(257, 32, 1)).toBe(8);
    expect(computeTrainingSteps(31, 32, 1)).toBe(0);
  });

  it('matches the reference full-corpus figure', () => {
    expect(computeTrainingSteps(187_542, 32, 1)).toBe(5860);
  });

  it('scales linearly with epochs', () => {
    expect(computeTrainingSteps(512, 32, 200)).toBe(3200);
  });

  it('rejects a zero batch and bad ranges', () => {
    expect(() => computeTrainingSteps(100, 0, 1)).toThrow(ZeroBatch);
    expect(() => computeTrainingSteps(-1, 32, 1)).toThrow(RangeError);
    expect(() => computeTrainingSteps(100, 32, 0)).toThrow(RangeError);
  });
});

describe('parseTrainingConfig', () => {
  it('accepts the reference hyperparameters', () => {
    const config = parseTrainingConfig(JSON.stringify(REFERENCE_CONFIG));
    expect(config).toEqual(REFERENCE_CONFIG);
  });

  it('rejects an inconsistent effective batch', () => {
    const bad = { ...REFERENCE_CONFIG, effective_batch: 33 };
    expect(() => parseTrainingConfig(JSON.stringify(bad))).toThrow(ConfigMismatch);
  });

  it('rejects unknown fields and missing fields', () => {
    expect(() =>
      parseTrainingConfig(JSON.stringify({ ...REFERENCE_CONFIG, extra: 1 })),
    ).toThrow();
    const { learning_rate: _dropped, ...partial } = REFERENCE_CONFIG;
    expect(() => parseTrainingConfig(JSON.stringify(partial))).toThrow();
  });

  it('rejects non-positive hyperparameters', () => {
    expect(() =>
      parseTrainingConfig(JSON.stringify({ ...REFERENCE_CONFIG, learning_rate: 0 })),
    ).toThrow();
    expect(() =>
      parseTrainingConfig(JSON.stringify({ ...REFERENCE_CONFIG, epochs: 0 })),
    ).toThrow();
  });
});
