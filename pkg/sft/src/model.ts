/**
 * Toy character-level causal LM and JSON checkpointing.
 *
 * The model predicts the next character from a fixed-width context window:
 * embedding -> flatten -> dense(relu) -> dense(vocab logits). It is small
 * enough to train on CPU in minutes yet expressive enough to memorize the
 * trace format, which is all the smoke pipeline needs.
 */
import * as tf from '@tensorflow/tfjs';
import * as fs from 'node:fs';
import * as path from 'node:path';
import { PAD_ID, Vocab, encode, vocabSize } from './data';

export class CheckpointMissing extends Error {}

export const MODEL_IDENTIFIER = 'char-react-lm-24x96';
export const CONTEXT_LENGTH = 16;
export const EMBEDDING_DIM = 24;
export const HIDDEN_DIM = 96;

export interface CharLm {
  model: tf.Sequential;
  vocab: Vocab;
  contextLength: number;
}

export function buildModel(vocab: Vocab, seed = 7): CharLm {
  const v = vocabSize(vocab);
  const model = tf.sequential();
  model.add(
    tf.layers.embedding({
      inputDim: v,
      outputDim: EMBEDDING_DIM,
      inputLength: CONTEXT_LENGTH,
      embeddingsInitializer: tf.initializers.randomUniform({ minval: -0.05, maxval: 0.05, seed }),
    }),
  );
  model.add(tf.layers.flatten());
  model.add(
    tf.layers.dense({
      units: HIDDEN_DIM,
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
    }),
  );
  model.add(
    tf.layers.dense({
      units: v,
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
    }),
  );
  return { model, vocab, contextLength: CONTEXT_LENGTH };
}

export function saveCheckpoint(lm: CharLm, file: string): void {
  const weights = lm.model.getWeights().map((w) => ({
    shape: w.shape,
    values: Array.from(w.dataSync()),
  }));
  fs.mkdirSync(path.dirname(file), { recursive: true });
  fs.writeFileSync(
    file,
    JSON.stringify({
      model_identifier: MODEL_IDENTIFIER,
      context_length: lm.contextLength,
      vocab: lm.vocab.chars,
      weights,
    }),
  );
}

export function loadCheckpoint(file: string): CharLm {
  if (!fs.existsSync(file)) {
    throw new CheckpointMissing(`no checkpoint at ${file}`);
  }
  const doc = JSON.parse(fs.readFileSync(file, 'utf-8'));
  const vocab: Vocab = { chars: doc.vocab };
  const lm = buildModel(vocab);
  lm.model.setWeights(
    doc.weights.map((w: { shape: number[]; values: number[] }) =>
      tf.tensor(w.values, w.shape),
    ),
  );
  return lm;
}

/** Greedy next-character generation from a text prompt. */
export function generate(lm: CharLm, prompt: string, maxNewChars: number): string {
  const ids = encode(prompt, lm.vocab);
  const out: number[] = [];
  for (let i = 0; i < maxNewChars; i++) {
    const context = ids.slice(-lm.contextLength);
    while (context.length < lm.contextLength) context.unshift(PAD_ID);
    const next = tf.tidy(() => {
      const logits = lm.model.apply(
        tf.tensor2d([context], [1, lm.contextLength], 'int32'),
      ) as tf.Tensor;
      return logits.argMax(-1).dataSync()[0];
    });
    ids.push(next);
    out.push(next);
  }
  return out.map((id) => (id === PAD_ID ? '' : lm.vocab.chars[id - 1])).join('');
}
