/** 202-and-poll helper: questions run server-side, one per session. */

import type { ApiClient } from './api.js';
import type { Artifact, QuestionStatus } from './types.js';

export interface PollOptions {
  intervalMs?: number; // the workbench polls at 500 ms
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export async function pollQuestion(
  client: ApiClient,
  sessionId: string,
  questionId: string,
  options: PollOptions = {},
): Promise<QuestionStatus> {
  const interval = options.intervalMs ?? 500;
  const timeout = options.timeoutMs ?? 300_000;
  const sleep = options.sleep ?? defaultSleep;
  const started = Date.now();
  for (;;) {
    const status = await client.questionStatus(sessionId, questionId);
    if (status.status !== 'running') return status;
    if (Date.now() - started > timeout) {
      throw new Error(`question ${questionId} still running after ${timeout}ms`);
    }
    await sleep(interval);
  }
}

/** POST a question, poll to completion, fetch the artifact. */
export async function askAndAwait(
  client: ApiClient,
  sessionId: string,
  category: string,
  params: Record<string, unknown>,
  options: PollOptions = {},
): Promise<{ artifact: Artifact; index: number }> {
  const accepted = await client.postQuestion(sessionId, {
    category: category as never,
    params,
  });
  const status = await pollQuestion(client, sessionId, accepted.question_id, options);
  if (status.status === 'error') {
    throw new Error(status.error?.message ?? 'question failed');
  }
  const index = status.artifact_index ?? -1;
  const artifact = await client.artifact(sessionId, index);
  return { artifact, index };
}
