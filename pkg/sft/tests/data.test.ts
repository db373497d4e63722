import * as fs from 'node:fs';
import * as path from 'node:path';
import { describe, expect, it } from 'vitest';
import {
  CharDataset,
  DatasetEmpty,
  PAD_ID,
  SeededRng,
  buildVocab,
  decode,
  encode,
  readTrainingJsonl,
  vocabSize,
} from '../src/data';
import { TEMPLATE, tmpDir, writeCorpus } from './helpers';

describe('readTrainingJsonl', () => {
  it('reads {"text"} records in order, skipping blank lines', () => {
    const dir = tmpDir('sft-data-');
    const file = writeCorpus(dir, 3);
    fs.appendFileSync(file, '\n');
    expect(readTrainingJsonl(file)).toEqual([TEMPLATE, TEMPLATE, TEMPLATE]);
  });

  it('rejects records without a string text field', () => {
    const dir = tmpDir('sft-data-');
    const file = path.join(dir, 'bad.jsonl');
    fs.writeFileSync(file, JSON.stringify({ text: 42 }) + '\n');
    expect(() => readTrainingJsonl(file)).toThrow(TypeError);
  });
});

describe('vocab and encoding', () => {
  it('round-trips text through encode/decode', () => {
    const vocab = buildVocab([TEMPLATE]);
    expect(decode(encode(TEMPLATE, vocab), vocab)).toBe(TEMPLATE);
    expect(vocabSize(vocab)).toBe(vocab.chars.length + 1);
  });

  it('maps unknown characters to the pad id', () => {
    const vocab = buildVocab(['ab']);
    expect(encode('abz', vocab)).toEqual([1, 2, PAD_ID]);
  });
});

describe('CharDataset', () => {
  it('rejects an empty corpus', () => {
    expect(() => new CharDataset([], 16, 8192)).toThrow(DatasetEmpty);
  });

  it('right-truncates sequences at max_seq_len characters', () => {
    const ds = new CharDataset(['abcdefgh'], 4, 5);
    expect(ds.sequences[0].length).toBe(5);
  });

  it('pads contexts on the left and samples deterministically per seed', () => {
    const ds = new CharDataset([TEMPLATE], 16, 8192);
    const a = ds.sampleBatch(8, new SeededRng(7));
    const b = ds.sampleBatch(8, new SeededRng(7));
    expect(a).toEqual(b);
    for (const w of a) {
      expect(w.context.length).toBe(16);
      expect(w.target).toBeGreaterThan(0);
    }
    const early = ds.sequences[0].slice(0, 1);
    const window = new CharDataset(['xy'], 16, 8192).sampleBatch(1, new SeededRng(1))[0];
    expect(window.context.slice(0, 15)).toEqual(Array(15).fill(PAD_ID));
    expect(early.length).toBe(1);
  });

  it('probe batch is independent of the training batch stream', () => {
    const ds = new CharDataset([TEMPLATE], 16, 8192);
    const probe1 = ds.probeBatch(16, 99);
    ds.sampleBatch(32, new SeededRng(5));
    const probe2 = ds.probeBatch(16, 99);
    expect(probe1).toEqual(probe2);
  });
});
