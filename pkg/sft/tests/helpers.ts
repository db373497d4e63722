import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { TrainingConfig } from '../src/config';

/**
 * One synthetic training example in the reactbench sequence format: role
 * delimiters, a canonical trace step in the assistant turn, and the
 * end-of-example marker.
 */
export const TEMPLATE =
  '<|user|>\nFind facts about topic X.\n<|assistant|>\n' +
  'Thought: I should look this up\nAction: lookup_info\n' +
  'Action Input: {"topic": "X"}\n<|endofexample|>';

/** The reference fine-tuning hyperparameters. */
export const REFERENCE_CONFIG: TrainingConfig = {
  learning_rate: 5e-5,
  warmup_steps: 100,
  per_device_batch: 8,
  grad_accumulation: 4,
  effective_batch: 32,
  max_grad_norm: 0.3,
  weight_decay: 0.01,
  epochs: 1,
  mixed_precision: true,
  gradient_checkpointing: true,
  max_seq_len: 8192,
};

export function tmpDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

/** Write an n-example training JSONL corpus of repeated templates. */
export function writeCorpus(dir: string, n: number): string {
  const file = path.join(dir, 'train.jsonl');
  const lines = Array.from({ length: n }, () => JSON.stringify({ text: TEMPLATE }));
  fs.writeFileSync(file, lines.join('\n') + '\n');
  return file;
}

export function writeConfig(dir: string, config: TrainingConfig): string {
  const file = path.join(dir, 'config.json');
  fs.writeFileSync(file, JSON.stringify(config, null, 2));
  return file;
}

export const mean = (xs: number[]): number => xs.reduce((a, b) => a + b, 0) / xs.length;
