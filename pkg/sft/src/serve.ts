/**
 * Completion server speaking the reactbench gateway wire format:
 * POST / with {"prompt", "temperature", "max_new_tokens", "stop"} and the
 * response is {"text": ...}. Generation is greedy; stop sequences cut the
 * completion at their first occurrence.
 */
import express from 'express';
import type { Server } from 'node:http';
import { CharLm, generate, loadCheckpoint } from './model';

export function buildApp(lm: CharLm): express.Express {
  const app = express();
  app.use(express.json({ limit: '4mb' }));
  app.post('/', (req, res) => {
    const { prompt, max_new_tokens: maxNewTokens, stop } = req.body ?? {};
    if (typeof prompt !== 'string') {
      res.status(400).json({ error: 'prompt must be a string' });
      return;
    }
    let text = generate(lm, prompt, Math.min(Number(maxNewTokens) || 120, 512));
    for (const stopSeq of Array.isArray(stop) ? stop : []) {
      const at = text.indexOf(String(stopSeq));
      if (at >= 0) text = text.slice(0, at);
    }
    res.json({ text });
  });
  return app;
}

export function serveCheckpoint(checkpointPath: string, port: number): Server {
  return buildApp(loadCheckpoint(checkpointPath)).listen(port);
}
