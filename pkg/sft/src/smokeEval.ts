/**
 * Smoke evaluation: does greedy generation adhere to the canonical trace
 * step format? Measures the fraction of prompts whose continuation parses
 * as the start of a Thought / Action / Action Input block.
 */
import { CharLm, generate } from './model';

export class EmptyPrompts extends Error {}

const GENERATION_LENGTH = 120;

// Line-start, case-sensitive labels, matching the canonical step grammar:
//   Thought: ...\nAction: <non-empty, single line>\nAction Input: ...
const STEP_HEAD = /^Thought:[^\n]*\nAction:[ \t]*\S[^\n]*\nAction Input:/;

/** True when text begins with a well-formed step head. */
export function canParseStep(text: string): boolean {
  return STEP_HEAD.test(text);
}

export interface SmokeEvalResult {
  fraction: number;
  perPrompt: { prompt: string; completion: string; parsed: boolean }[];
}

/** Greedy-generate from each prompt and score trace-format adherence. */
export function smokeEval(
  lm: CharLm,
  prompts: string[],
  maxNewChars: number = GENERATION_LENGTH,
): SmokeEvalResult {
  if (prompts.length === 0) {
    throw new EmptyPrompts('smoke eval needs at least one prompt');
  }
  const perPrompt = prompts.map((prompt) => {
    const completion = generate(lm, prompt, maxNewChars);
    return { prompt, completion, parsed: canParseStep(completion) };
  });
  const parsed = perPrompt.filter((p) => p.parsed).length;
  return { fraction: parsed / prompts.length, perPrompt };
}
