#!/usr/bin/env node
/** Command-line entry points: train, smoke-eval, serve. */
import * as fs from 'node:fs';
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { loadCheckpoint } from './model';
import { serveCheckpoint } from './serve';
import { smokeEval } from './smokeEval';
import { trainFromFiles } from './train';

yargs(hideBin(process.argv))
  .scriptName('sft-adapter')
  .command(
    'train',
    'train a toy model on a training JSONL file',
    (y) =>
      y
        .option('config', { type: 'string', demandOption: true, describe: 'TrainingConfig JSON' })
        .option('data', { type: 'string', demandOption: true, describe: 'training JSONL' })
        .option('out', { type: 'string', demandOption: true, describe: 'output directory' })
        .option('seed', { type: 'number', default: 42 })
        .option('log-every', { type: 'number', default: 1000 }),
    (argv) => {
      const { result, paths } = trainFromFiles(argv.config, argv.data, argv.out, {
        seed: argv.seed,
        logEvery: argv['log-every'],
        onLog: (r) =>
          console.error(`step ${r.step}: loss=${r.loss.toFixed(4)} lr=${r.lr.toExponential(2)}`),
      });
      console.log(JSON.stringify({ ...result.manifest, paths }, null, 2));
    },
  )
  .command(
    'smoke-eval',
    'score trace-format adherence of greedy generations',
    (y) =>
      y
        .option('checkpoint', { type: 'string', demandOption: true })
        .option('prompts', { type: 'string', demandOption: true, describe: 'one prompt per line (\\n escapes honored)' }),
    (argv) => {
      const prompts = fs
        .readFileSync(argv.prompts, 'utf-8')
        .split('\n')
        .filter((l) => l.trim())
        .map((l) => l.replace(/\\n/g, '\n'));
      const result = smokeEval(loadCheckpoint(argv.checkpoint), prompts);
      console.log(JSON.stringify(result, null, 2));
    },
  )
  .command(
    'serve',
    'serve completions over the gateway wire format',
    (y) =>
      y
        .option('checkpoint', { type: 'string', demandOption: true })
        .option('port', { type: 'number', default: 8100 }),
    (argv) => {
      serveCheckpoint(argv.checkpoint, argv.port);
      console.error(`listening on :${argv.port}`);
    },
  )
  .demandCommand(1)
  .strict()
  .fail((msg, err) => {
    console.error(msg ?? err?.message ?? 'unknown error');
    process.exit(err ? 2 : 1);
  })
  .parse();
