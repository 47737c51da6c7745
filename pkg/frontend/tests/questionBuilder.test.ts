import { describe, expect, it } from 'vitest';

import {
  canSubmit,
  combinationHint,
  emptyBuilder,
  pickerCategories,
  prefillFromSuggestion,
  selectCategory,
  setParam,
  toQuestion,
  validate,
} from '../src/questionBuilder.js';
import type { Artifact } from '../src/types.js';

function ratingArtifact(index = 0): Artifact {
  return {
    kind: 'group_disparity',
    inputs: { category: 'group_disparity', params: { model: 'rf' } },
    values: {},
    metadata: {
      seed: 7,
      index,
      session: 's',
      plan: {
        category: 'group_disparity',
        calls: ['compute_wrs'],
        hint: 'Combine with DIE % to check if protected attribute has a confounding or direct effect.',
        suggested_followup: 'confounding_distortion',
      },
    },
  };
}

describe('question builder', () => {
  it('starts unsubmittable', () => {
    expect(canSubmit(emptyBuilder())).toBe(false);
  });

  it('category selection seeds defaults', () => {
    const draft = selectCategory(emptyBuilder(), 'baseline_resemblance');
    expect(draft.params['metric']).toBe('wrs');
    expect(canSubmit(draft)).toBe(true);
  });

  it('required params gate submission', () => {
    let draft = selectCategory(emptyBuilder(), 'local_attribution');
    expect(canSubmit(draft)).toBe(false);
    expect(validate(draft).missing).toContain('instance');
    draft = setParam(draft, 'instance', '42');
    expect(canSubmit(draft)).toBe(true);
  });

  it('rejects malformed instances', () => {
    let draft = selectCategory(emptyBuilder(), 'local_attribution');
    draft = setParam(draft, 'instance', '-3');
    expect(canSubmit(draft)).toBe(false);
    draft = setParam(draft, 'instance', '4.5');
    expect(canSubmit(draft)).toBe(false);
    draft = setParam(draft, 'instance', '12');
    expect(canSubmit(draft)).toBe(true);
  });

  it('serializes numeric params as numbers', () => {
    let draft = selectCategory(emptyBuilder(), 'minimal_change');
    draft = setParam(draft, 'instance', '2');
    const question = toQuestion(draft);
    expect(question.params['instance']).toBe(2);
    expect(question.params['target_class']).toBe(1);
  });

  it('throws on invalid drafts', () => {
    expect(() => toQuestion(emptyBuilder())).toThrow(/invalid/);
  });

  it('surfaces the combination hint verbatim', () => {
    expect(combinationHint(ratingArtifact())).toMatch(/Combine with DIE %/);
  });

  it('prefills the suggested follow-up with carried-over params', () => {
    const draft = prefillFromSuggestion(ratingArtifact(3));
    expect(draft.category).toBe('confounding_distortion');
    expect(draft.params['model']).toBe('rf');
    expect(draft.prefilledFrom).toBe(3);
  });

  it('role presets filter the picker', () => {
    const individual = pickerCategories('individual');
    expect(individual).toContain('minimal_change');
    expect(individual).not.toContain('group_perturbation_sensitivity');
    const org = pickerCategories('organizational');
    expect(org).toContain('group_perturbation_sensitivity');
  });
});
