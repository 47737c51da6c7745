/** End-to-end workbench flow against the real service: spawns `hxai serve`,
 * builds the credit-audit session, and walks the four-question sequence the
 * bundled "jack" scenario uses, entirely through the client modules. */

import { type ChildProcess, spawn } from 'node:child_process';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { canSubmit, selectCategory, setParam, toQuestion } from '../src/questionBuilder.js';
import { WorkbenchViewModel } from '../src/viewModel.js';
import { scaleSlider, WhatIfPanel } from '../src/whatif.js';

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let client: ApiClient;

async function waitForHealth(timeoutMs = 60_000): Promise<void> {
  const started = Date.now();
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() - started > timeoutMs) throw new Error('service never came up');
    await new Promise((r) => setTimeout(r, 300));
  }
}

beforeAll(async () => {
  server = spawn('hxai', ['serve', '--port', String(PORT)], {
    stdio: 'ignore',
    env: { ...process.env, HXAI_NUMBA: process.env['HXAI_NUMBA'] ?? '0' },
  });
  await waitForHealth();
  client = new ApiClient(BASE);
  await client.registerDataset({
    id: 'german',
    builtin: 'german_credit',
    derive: [{ op: 'derive_sex' }],
  });
  await client.registerModel({
    name: 'random_forest',
    train: {
      algo: 'tree_ensemble',
      data: 'german',
      config: { n_trees: 150, max_depth: 4, mode: 'bagging', seed: 3 },
    },
  });
  await client.createSession({
    id: 'jack',
    dataset: 'german',
    models: ['random_forest'],
    seed: 7,
    stakeholder_role: 'individual',
    causal_spec: {
      treatment: 'Credit amount',
      outcome: 'Cost Matrix(Risk)',
      protected: ['Sex', 'Age in years'],
    },
    baselines: { biased: { group_outputs: { male: 1.0, female: 0.0 } } },
  });
}, 120_000);

afterAll(() => {
  server?.kill();
});

describe('four-question walkthrough', () => {
  it('produces four artifact cards in order, surfaces the follow-up after Q1, and the x1.0 slider renders ATE 0', async () => {
    const vm = new WorkbenchViewModel(
      client,
      { id: 'jack', models: ['random_forest'], task: 'binary_classification', stakeholder_role: 'individual' },
      { intervalMs: 250 },
    );

    // Q1: how does the model rate against the baselines?
    let draft = selectCategory(vm.builder, 'baseline_resemblance');
    expect(canSubmit(draft)).toBe(true);
    vm.builder = draft;
    const card1 = await vm.ask(toQuestion(draft));
    expect(card1.index).toBe(0);
    const markers = vm.comparison(card1);
    expect(markers).not.toBeNull();
    expect(markers!.biased).toBeCloseTo(2.4, 5);
    // the Table-style follow-up suggestion appears after Q1
    expect(vm.suggestion).not.toBeNull();
    expect(card1.hint.length).toBeGreaterThan(0);

    // Q2: which features drove the rejection?
    draft = selectCategory(vm.builder, 'local_attribution');
    draft = setParam(draft, 'instance', '2');
    draft = setParam(draft, 'model', 'random_forest');
    vm.builder = draft;
    const card2 = await vm.ask(toQuestion(draft));
    expect(card2.index).toBe(1);
    const shap = card2.artifact.values as { feature_names: string[]; phis: number[] };
    expect(shap.feature_names.length).toBeGreaterThan(10);

    // Q3: smallest change to the loan duration
    draft = selectCategory(vm.builder, 'minimal_change');
    draft = setParam(draft, 'instance', '2');
    draft = setParam(draft, 'model', 'random_forest');
    draft = setParam(draft, 'mutable_only', ['Duration in month']);
    vm.builder = draft;
    const card3 = await vm.ask(toQuestion(draft));
    const cf3 = card3.artifact.values as { found: boolean; changed_features: string[] };
    expect(cf3.found).toBe(true);
    expect(cf3.changed_features).toEqual(['Duration in month']);

    // Q4: smallest change to the checking account status
    draft = selectCategory(vm.builder, 'minimal_change');
    draft = setParam(draft, 'instance', '2');
    draft = setParam(draft, 'model', 'random_forest');
    draft = setParam(draft, 'mutable_only', ['Status of existing checking account']);
    vm.builder = draft;
    const card4 = await vm.ask(toQuestion(draft));
    expect(card4.index).toBe(3);

    // four cards, in asked order
    expect(vm.cards.map((c) => c.index)).toEqual([0, 1, 2, 3]);
    expect(vm.cards.map((c) => c.category)).toEqual([
      'baseline_resemblance',
      'local_attribution',
      'minimal_change',
      'minimal_change',
    ]);

    // refresh restores the full view from the API alone
    const fresh = new WorkbenchViewModel(
      client,
      { id: 'jack', models: ['random_forest'], task: 'binary_classification', stakeholder_role: 'individual' },
    );
    await fresh.hydrate();
    expect(fresh.cards.map((c) => c.index)).toEqual([0, 1, 2, 3]);
    expect(fresh.cards[0].hint).toBe(vm.cards[0].hint);

    // the x1.0 what-if slider renders ATE 0
    const panel = new WhatIfPanel(client, 'jack', scaleSlider('Credit amount'),
      'random_forest', 10);
    panel.setValue(1.0);
    await panel.settle();
    expect(panel.state.latest?.result.ate).toBe(0);
    expect(panel.state.latest?.result.direction).toBe('none');
  }, 300_000);

  it('one-click suggestion prefills the builder', async () => {
    const vm = new WorkbenchViewModel(
      client,
      { id: 'jack', models: ['random_forest'], task: 'binary_classification', stakeholder_role: 'individual' },
    );
    await vm.hydrate();
    expect(vm.suggestion).not.toBeNull();
    const draft = vm.acceptSuggestion();
    expect(draft.category).toBe(vm.suggestion!.category);
    expect(draft.prefilledFrom).toBe(vm.cards[vm.cards.length - 1].index);
  });

  it('busy session rejections surface as API errors', async () => {
    const slow = client.postQuestion('jack', {
      category: 'global_attribution',
      params: { model: 'random_forest', sample_instances: 30, background_size: 100 },
    });
    await new Promise((r) => setTimeout(r, 150));
    await expect(
      client.postQuestion('jack', { category: 'group_disparity', params: {} }),
    ).rejects.toMatchObject({ status: 409 });
    const accepted = await slow;
    // drain so later tests see an idle session
    const { pollQuestion } = await import('../src/poll.js');
    await pollQuestion(client, 'jack', accepted.question_id, { intervalMs: 300 });
  }, 300_000);
});
