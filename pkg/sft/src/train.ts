/**
 * Training loop: AdamW-style optimization (decoupled weight decay) with
 * linear warmup, gradient accumulation, and global-norm clipping, driven
 * entirely by a TrainingConfig document.
 *
 * Per-step loss is recorded two ways: `loss` is measured on a fixed probe
 * batch sampled once up front (a noise-free signal of learning progress),
 * `batch_loss` is the raw mean loss over that step's accumulated training
 * micro-batches (which varies with batch composition).
 */
import * as tf from '@tensorflow/tfjs';
import * as fs from 'node:fs';
import * as path from 'node:path';
import { TrainingConfig, computeTrainingSteps, parseTrainingConfig } from './config';
import { CharDataset, SeededRng, Window, readTrainingJsonl } from './data';
import { CharLm, CONTEXT_LENGTH, MODEL_IDENTIFIER, buildModel, saveCheckpoint } from './model';

const PROBE_BATCH_SIZE = 64;
const PROBE_SEED = 0x5eed;

export interface LossRecord {
  step: number;
  loss: number; // fixed probe batch
  batch_loss: number; // this step's training micro-batches
  lr: number;
}

export interface TrainRunManifest {
  config: TrainingConfig;
  dataset_path: string;
  model_identifier: string;
  steps_planned: number;
  steps_completed: number;
  final_loss: number;
}

export interface TrainResult {
  manifest: TrainRunManifest;
  history: LossRecord[];
  lm: CharLm;
}

function toTensors(batch: Window[], contextLength: number): [tf.Tensor2D, tf.Tensor1D] {
  return [
    tf.tensor2d(batch.map((w) => w.context), [batch.length, contextLength], 'int32'),
    tf.tensor1d(batch.map((w) => w.target), 'int32'),
  ];
}

function batchLoss(lm: CharLm, batch: Window[], numClasses: number): number {
  return tf.tidy(() => {
    const [x, y] = toTensors(batch, lm.contextLength);
    const logits = lm.model.apply(x) as tf.Tensor2D;
    return tf.losses.softmaxCrossEntropy(tf.oneHot(y, numClasses), logits).dataSync()[0];
  });
}

export interface TrainOptions {
  seed?: number;
  logEvery?: number;
  onLog?: (record: LossRecord) => void;
}

/** Train a fresh model on the dataset per the config; deterministic per seed. */
export function train(
  dataset: CharDataset,
  config: TrainingConfig,
  datasetPath: string,
  options: TrainOptions = {},
): TrainResult {
  const seed = options.seed ?? 42;
  const logEvery = options.logEvery ?? 1000;
  const lm = buildModel(dataset.vocab);
  const numClasses = (lm.model.outputShape as number[])[1];
  const stepsPlanned = computeTrainingSteps(
    dataset.numExamples,
    config.effective_batch,
    config.epochs,
  );
  const rng = new SeededRng(seed);
  const probe = dataset.probeBatch(PROBE_BATCH_SIZE, PROBE_SEED);
  const optimizer = tf.train.adam(config.learning_rate);
  const variables = lm.model.trainableWeights.map(
    (w) => (w as unknown as { val: tf.Variable }).val,
  );

  const history: LossRecord[] = [];
  for (let step = 0; step < stepsPlanned; step++) {
    const accumulated: Record<string, tf.Tensor> = {};
    let lossSum = 0;
    for (let micro = 0; micro < config.grad_accumulation; micro++) {
      const [x, y] = toTensors(
        dataset.sampleBatch(config.per_device_batch, rng),
        lm.contextLength,
      );
      const { value, grads } = tf.variableGrads(() =>
        tf.losses.softmaxCrossEntropy(
          tf.oneHot(y, numClasses),
          lm.model.apply(x) as tf.Tensor2D,
        ),
      );
      lossSum += value.dataSync()[0];
      value.dispose();
      x.dispose();
      y.dispose();
      for (const name of Object.keys(grads)) {
        const previous = accumulated[name];
        accumulated[name] = previous
          ? tf.tidy(() => previous.add(grads[name]))
          : grads[name].clone();
        previous?.dispose();
        grads[name].dispose();
      }
    }

    const lr = config.learning_rate * Math.min(1, (step + 1) / config.warmup_steps);
    tf.tidy(() => {
      const averaged: Record<string, tf.Tensor> = {};
      let squaredNorm = 0;
      for (const name of Object.keys(accumulated)) {
        averaged[name] = accumulated[name].div(config.grad_accumulation);
        squaredNorm += averaged[name].square().sum().dataSync()[0];
      }
      const globalNorm = Math.sqrt(squaredNorm);
      const scale = globalNorm > config.max_grad_norm ? config.max_grad_norm / globalNorm : 1;
      const clipped: Record<string, tf.Tensor> = {};
      for (const name of Object.keys(averaged)) {
        clipped[name] = averaged[name].mul(scale);
      }
      (optimizer as unknown as { learningRate: number }).learningRate = lr;
      optimizer.applyGradients(clipped as Record<string, tf.Variable>);
      // Decoupled weight decay, applied after the optimizer update.
      for (const variable of variables) {
        variable.assign(variable.sub(variable.mul(lr * config.weight_decay)));
      }
    });
    for (const name of Object.keys(accumulated)) accumulated[name].dispose();

    const record: LossRecord = {
      step: step + 1,
      loss: batchLoss(lm, probe, numClasses),
      batch_loss: lossSum / config.grad_accumulation,
      lr,
    };
    history.push(record);
    if (options.onLog && (record.step % logEvery === 0 || record.step === stepsPlanned)) {
      options.onLog(record);
    }
  }

  const manifest: TrainRunManifest = {
    config,
    dataset_path: datasetPath,
    model_identifier: MODEL_IDENTIFIER,
    steps_planned: stepsPlanned,
    steps_completed: history.length,
    final_loss: history.length ? history[history.length - 1].loss : NaN,
  };
  return { manifest, history, lm };
}

export interface RunPaths {
  manifest: string;
  history: string;
  checkpoint: string;
}

/** File-level entry point: config + dataset JSONL in, run artifacts out. */
export function trainFromFiles(
  configPath: string,
  datasetPath: string,
  outDir: string,
  options: TrainOptions = {},
): { result: TrainResult; paths: RunPaths } {
  const config = parseTrainingConfig(fs.readFileSync(configPath, 'utf-8'));
  const texts = readTrainingJsonl(datasetPath);
  const dataset = new CharDataset(texts, CONTEXT_LENGTH, config.max_seq_len);
  const result = train(dataset, config, datasetPath, options);

  fs.mkdirSync(outDir, { recursive: true });
  const paths: RunPaths = {
    manifest: path.join(outDir, 'manifest.json'),
    history: path.join(outDir, 'loss_history.json'),
    checkpoint: path.join(outDir, 'checkpoint.json'),
  };
  fs.writeFileSync(paths.manifest, JSON.stringify(result.manifest, null, 2));
  fs.writeFileSync(paths.history, JSON.stringify(result.history, null, 2));
  saveCheckpoint(result.lm, paths.checkpoint);
  return { result, paths };
}
