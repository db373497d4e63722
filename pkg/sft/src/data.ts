/**
 * Training-data loading: reads the reactbench training JSONL format
 * ({"text": ...} per line), builds a character vocabulary, and samples
 * next-character prediction windows with a seeded generator so runs are
 * reproducible.
 */
import * as fs from 'node:fs';

export class DatasetEmpty extends Error {}

export const PAD_ID = 0;

/** Deterministic 32-bit LCG; good enough for batch sampling. */
export class SeededRng {
  private state: number;

  constructor(seed: number) {
    this.state = seed >>> 0;
  }

  /** Uniform float in [0, 1). */
  next(): number {
    this.state = (Math.imul(this.state, 1664525) + 1013904223) >>> 0;
    return this.state / 4294967296;
  }

  nextInt(bound: number): number {
    return Math.floor(this.next() * bound);
  }
}

/** Read a training JSONL file into its text sequences, preserving order. */
export function readTrainingJsonl(path: string): string[] {
  const texts: string[] = [];
  for (const line of fs.readFileSync(path, 'utf-8').split('\n')) {
    if (!line.trim()) continue;
    const record = JSON.parse(line);
    if (typeof record.text !== 'string') {
      throw new TypeError('training records must carry a string "text" field');
    }
    texts.push(record.text);
  }
  return texts;
}

export interface Vocab {
  /** Characters in sorted order; ids are index + 1 (0 is the pad id). */
  chars: string[];
}

export function buildVocab(texts: string[]): Vocab {
  return { chars: [...new Set(texts.join(''))].sort() };
}

export function vocabSize(vocab: Vocab): number {
  return vocab.chars.length + 1; // + pad
}

export function encode(text: string, vocab: Vocab): number[] {
  const stoi = new Map(vocab.chars.map((c, i) => [c, i + 1]));
  return [...text].map((c) => stoi.get(c) ?? PAD_ID);
}

export function decode(ids: number[], vocab: Vocab): string {
  return ids.map((id) => (id === PAD_ID ? '' : vocab.chars[id - 1])).join('');
}

export interface Window {
  context: number[]; // left-padded to contextLength
  target: number;
}

/**
 * Character-level dataset over next-character windows. Each sequence is
 * right-truncated at maxSeqLen characters (the char-level analogue of the
 * token cap).
 */
export class CharDataset {
  readonly vocab: Vocab;
  readonly sequences: number[][];
  readonly contextLength: number;

  constructor(texts: string[], contextLength: number, maxSeqLen: number, vocab?: Vocab) {
    if (texts.length === 0) {
      throw new DatasetEmpty('no training sequences');
    }
    this.contextLength = contextLength;
    const truncated = texts.map((t) => t.slice(0, maxSeqLen));
    this.vocab = vocab ?? buildVocab(truncated);
    this.sequences = truncated.map((t) => encode(t, this.vocab));
  }

  get numExamples(): number {
    return this.sequences.length;
  }

  private windowAt(seq: number[], pos: number): Window {
    const context = seq.slice(Math.max(0, pos - this.contextLength), pos);
    while (context.length < this.contextLength) context.unshift(PAD_ID);
    return { context, target: seq[pos] };
  }

  /** One seeded micro-batch of next-character windows. */
  sampleBatch(batchSize: number, rng: SeededRng): Window[] {
    const batch: Window[] = [];
    for (let b = 0; b < batchSize; b++) {
      const seq = this.sequences[rng.nextInt(this.sequences.length)];
      batch.push(this.windowAt(seq, 1 + rng.nextInt(seq.length - 1)));
    }
    return batch;
  }

  /**
   * Fixed probe batch for noise-free loss tracking: a seeded sample drawn
   * once, independent of the training batch stream.
   */
  probeBatch(size: number, seed: number): Window[] {
    return this.sampleBatch(size, new SeededRng(seed));
  }
}
