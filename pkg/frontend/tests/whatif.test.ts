import { describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { debounceAsync } from '../src/debounce.js';
import { describeResult, scaleSlider, shiftSlider, sliderToTreatment, WhatIfPanel } from '../src/whatif.js';
import type { HypothesisResult } from '../src/types.js';

function fakeClient(handler: (body: Record<string, unknown>) => HypothesisResult): {
  client: ApiClient;
  calls: Array<Record<string, unknown>>;
  inflight: () => number;
  maxInflight: () => number;
} {
  const calls: Array<Record<string, unknown>> = [];
  let inflight = 0;
  let maxInflight = 0;
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    if (!url.endsWith('/hypotheses')) throw new Error(`unexpected ${url}`);
    const body = JSON.parse(String(init?.body ?? '{}'));
    calls.push(body);
    inflight += 1;
    maxInflight = Math.max(maxInflight, inflight);
    await new Promise((r) => setTimeout(r, 5));
    inflight -= 1;
    return new Response(JSON.stringify(handler(body)), { status: 200 });
  };
  return {
    client: new ApiClient('http://test', fetchImpl),
    calls,
    inflight: () => inflight,
    maxInflight: () => maxInflight,
  };
}

function resultFor(body: Record<string, unknown>): HypothesisResult {
  const td = body['treatment_def'] as { value: number };
  const ate = td.value === 1.0 ? 0.0 : (td.value - 1.0) * 0.1;
  return {
    model: 'rf',
    ate,
    direction: ate === 0 ? 'none' : ate > 0 ? 'increase' : 'decrease',
    agreement: 'unspecified',
    verdict: 'v',
    ate_result: {},
  };
}

describe('slider mapping', () => {
  it('maps scale sliders to scale interventions', () => {
    const td = sliderToTreatment(scaleSlider('Credit amount'), 0.5);
    expect(td).toMatchObject({
      mode: 'interventional_transform',
      feature: 'Credit amount',
      op: 'scale',
      value: 0.5,
    });
  });

  it('maps shift sliders to shift interventions', () => {
    const td = sliderToTreatment(shiftSlider('t-1', -100, 100, 1), -100);
    expect(td).toMatchObject({ op: 'shift', value: -100 });
  });
});

describe('what-if panel', () => {
  it('slider at x1.0 renders ATE 0 / no effect', async () => {
    const { client } = fakeClient(resultFor);
    const panel = new WhatIfPanel(client, 's', scaleSlider('Credit amount'), 'rf', 1);
    panel.setValue(1.0);
    await panel.settle();
    expect(panel.state.latest?.result.ate).toBe(0);
    expect(panel.state.latest?.result.direction).toBe('none');
    expect(describeResult(panel.state.latest!.result)).toMatch(/No effect/);
    expect(describeResult(panel.state.latest!.result)).toMatch(/ATE 0/);
  });

  it('rapid drags collapse to the latest value with at most one in flight', async () => {
    const { client, calls, maxInflight } = fakeClient(resultFor);
    const panel = new WhatIfPanel(client, 's', scaleSlider('Credit amount'), 'rf', 2);
    for (const v of [0.9, 0.8, 0.7, 0.6, 0.5]) panel.setValue(v);
    await panel.settle();
    expect(maxInflight()).toBe(1);
    expect(calls.length).toBe(1);
    const td = calls[0]['treatment_def'] as { value: number };
    expect(td.value).toBe(0.5);
  });

  it('accumulates a history strip of tried hypotheses', async () => {
    const { client } = fakeClient(resultFor);
    const panel = new WhatIfPanel(client, 's', scaleSlider('Credit amount'), 'rf', 1);
    panel.setValue(0.5);
    await panel.settle();
    panel.setValue(2.0);
    await panel.settle();
    expect(panel.state.history.length).toBe(2);
    expect(panel.state.history[0].treatment.value).toBe(0.5);
    expect(panel.state.history[1].treatment.value).toBe(2.0);
  });

  it('renders API failures inline instead of throwing', async () => {
    const fetchImpl = async (): Promise<Response> =>
      new Response(JSON.stringify({ error: 'schema_error', message: 'bad feature' }), {
        status: 400,
      });
    const panel = new WhatIfPanel(new ApiClient('http://t', fetchImpl), 's',
      scaleSlider('nope'), 'rf', 1);
    panel.setValue(0.5);
    await panel.settle();
    expect(panel.state.error).toMatch(/bad feature/);
    expect(panel.state.latest).toBeNull();
  });
});

describe('debounceAsync', () => {
  it('runs a queued trailing call with the newest arguments', async () => {
    const seen: number[] = [];
    const fn = vi.fn(async (v: number) => {
      seen.push(v);
      await new Promise((r) => setTimeout(r, 10));
    });
    const debounced = debounceAsync(fn, 1);
    debounced(1);
    await new Promise((r) => setTimeout(r, 4)); // first call now in flight
    debounced(2);
    debounced(3);
    await debounced.flush();
    await debounced.flush();
    expect(seen[0]).toBe(1);
    expect(seen[seen.length - 1]).toBe(3);
    expect(seen).not.toContain(2);
  });
});
