import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { askAndAwait, pollQuestion } from '../src/poll.js';

function clientWithScript(
  script: Array<{ status: string; artifact_index?: number }>,
): { client: ApiClient; polls: () => number } {
  let polls = 0;
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    if (url.endsWith('/questions') && init?.method === 'POST') {
      return new Response(
        JSON.stringify({
          question_id: 'q-1',
          poll: '/sessions/s/questions/q-1',
          plan: { category: 'x', calls: [], hint: 'h', suggested_followup: 'minimal_change' },
        }),
        { status: 202 },
      );
    }
    if (url.includes('/questions/q-1')) {
      const step = script[Math.min(polls, script.length - 1)];
      polls += 1;
      return new Response(JSON.stringify({ question_id: 'q-1', ...step }), { status: 200 });
    }
    if (url.includes('/artifacts/')) {
      return new Response(
        JSON.stringify({
          kind: 'k',
          inputs: { category: 'k', params: {} },
          values: { ok: true },
          metadata: {
            seed: 0,
            index: 2,
            session: 's',
            plan: { category: 'k', calls: [], hint: 'h', suggested_followup: 'minimal_change' },
          },
        }),
        { status: 200 },
      );
    }
    throw new Error(`unexpected ${url}`);
  };
  return { client: new ApiClient('http://t', fetchImpl), polls: () => polls };
}

describe('polling', () => {
  it('polls until done at the configured interval', async () => {
    const { client, polls } = clientWithScript([
      { status: 'running' },
      { status: 'running' },
      { status: 'done', artifact_index: 2 },
    ]);
    const waits: number[] = [];
    const status = await pollQuestion(client, 's', 'q-1', {
      intervalMs: 500,
      sleep: async (ms) => {
        waits.push(ms);
      },
    });
    expect(status.status).toBe('done');
    expect(polls()).toBe(3);
    expect(waits).toEqual([500, 500]);
  });

  it('askAndAwait returns the fetched artifact with its index', async () => {
    const { client } = clientWithScript([{ status: 'done', artifact_index: 2 }]);
    const { artifact, index } = await askAndAwait(client, 's', 'group_disparity', {}, {
      sleep: async () => {},
    });
    expect(index).toBe(2);
    expect(artifact.values['ok']).toBe(true);
  });

  it('propagates question errors', async () => {
    const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
      if (init?.method === 'POST') {
        return new Response(
          JSON.stringify({ question_id: 'q-1', poll: 'p', plan: { category: 'x', calls: [], hint: '', suggested_followup: 'minimal_change' } }),
          { status: 202 },
        );
      }
      return new Response(
        JSON.stringify({
          question_id: 'q-1',
          status: 'error',
          error: { error: 'schema_error', message: 'boom' },
        }),
        { status: 200 },
      );
    };
    const client = new ApiClient('http://t', fetchImpl);
    await expect(
      askAndAwait(client, 's', 'group_disparity', {}, { sleep: async () => {} }),
    ).rejects.toThrow(/boom/);
  });

  it('times out a stuck question', async () => {
    const { client } = clientWithScript([{ status: 'running' }]);
    let now = 0;
    await expect(
      pollQuestion(client, 's', 'q-1', {
        intervalMs: 500,
        timeoutMs: 1,
        sleep: async () => {
          now += 1000;
          await new Promise((r) => setTimeout(r, now > 2000 ? 0 : 2));
        },
      }),
    ).rejects.toThrow(/still running/);
  });
});
