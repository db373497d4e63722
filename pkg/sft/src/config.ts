/**
 * Training configuration: the flat JSON hyperparameter bundle emitted by the
 * reactbench dataset tooling, plus the shared optimizer-step arithmetic.
 */
import { z } from 'zod';

export class ConfigMismatch extends Error {}
export class ZeroBatch extends Error {}

export const TrainingConfigSchema = z
  .object({
    learning_rate: z.number().positive(),
    warmup_steps: z.number().int().positive(),
    per_device_batch: z.number().int().positive(),
    grad_accumulation: z.number().int().positive(),
    effective_batch: z.number().int().positive(),
    max_grad_norm: z.number().positive(),
    weight_decay: z.number().positive(),
    epochs: z.number().int().min(1),
    mixed_precision: z.boolean(),
    gradient_checkpointing: z.boolean(),
    max_seq_len: z.number().int().positive(),
  })
  .strict();

export type TrainingConfig = z.infer<typeof TrainingConfigSchema>;

/** Parse and validate a TrainingConfig JSON document. */
export function parseTrainingConfig(text: string): TrainingConfig {
  const config = TrainingConfigSchema.parse(JSON.parse(text));
  if (config.effective_batch !== config.per_device_batch * config.grad_accumulation) {
    throw new ConfigMismatch(
      `effective_batch ${config.effective_batch} != per_device_batch ` +
        `${config.per_device_batch} * grad_accumulation ${config.grad_accumulation}`,
    );
  }
  return config;
}

/** Optimizer steps for one run: floor(examples / batch) * epochs (drop-last). */
export function computeTrainingSteps(
  numExamples: number,
  effectiveBatch: number,
  epochs: number,
): number {
  if (effectiveBatch === 0) {
    throw new ZeroBatch('effective_batch must be nonzero');
  }
  if (numExamples < 0 || effectiveBatch < 0 || epochs < 1) {
    throw new RangeError('num_examples/effective_batch >= 0 and epochs >= 1 required');
  }
  return Math.floor(numExamples / effectiveBatch) * epochs;
}
