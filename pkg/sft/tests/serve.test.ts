import type { AddressInfo } from 'node:net';
import type { Server } from 'node:http';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { buildVocab } from '../src/data';
import { buildModel } from '../src/model';
import { buildApp } from '../src/serve';
import { TEMPLATE } from './helpers';

let server: Server;
let url: string;

beforeAll(async () => {
  const lm = buildModel(buildVocab([TEMPLATE]));
  server = buildApp(lm).listen(0);
  await new Promise<void>((resolve) => server.once('listening', () => resolve()));
  url = `http://127.0.0.1:${(server.address() as AddressInfo).port}/`;
});

afterAll(() => {
  server.close();
});

async function post(body: unknown): Promise<Response> {
  return fetch(url, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(body),
  });
}

describe('completion wire format', () => {
  it('answers the gateway request shape with {"text"}', async () => {
    const resp = await post({
      prompt: 'Thought:',
      temperature: 0.1,
      max_new_tokens: 12,
      stop: [],
    });
    expect(resp.status).toBe(200);
    const doc = await resp.json();
    expect(typeof doc.text).toBe('string');
    expect(doc.text.length).toBeLessThanOrEqual(12);
  });

  it('honors stop sequences', async () => {
    // Generation is greedy, so two identical requests produce the same text;
    // learn the completion first, then stop on its tail.
    const full = (await (await post({ prompt: 'x', max_new_tokens: 40, stop: [] })).json()).text;
    const tail = full.slice(4);
    const resp = await post({ prompt: 'x', max_new_tokens: 40, stop: [tail] });
    const doc = await resp.json();
    expect(doc.text).toBe(full.slice(0, 4));
  });

  it('rejects requests without a prompt', async () => {
    const resp = await post({ max_new_tokens: 4 });
    expect(resp.status).toBe(400);
  });
});
