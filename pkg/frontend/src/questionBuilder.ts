/** Question-builder state: category picker populates a parameter form,
 * submission stays disabled until the form validates, and a completed
 * artifact's combination hint prefills the suggested follow-up. */

import { CATEGORIES, categoriesForRole } from './categories.js';
import type { Artifact, Question, QuestionCategory, StakeholderRole } from './types.js';

export interface BuilderState {
  category: QuestionCategory | null;
  params: Record<string, unknown>;
  prefilledFrom: number | null; // artifact index that suggested this draft
}

export function emptyBuilder(): BuilderState {
  return { category: null, params: {}, prefilledFrom: null };
}

export function selectCategory(state: BuilderState, category: QuestionCategory): BuilderState {
  const params: Record<string, unknown> = {};
  for (const field of CATEGORIES[category].fields) {
    if (field.default !== undefined) params[field.name] = field.default;
  }
  return { category, params, prefilledFrom: null };
}

export function setParam(state: BuilderState, name: string, value: unknown): BuilderState {
  const params = { ...state.params };
  if (value === '' || value === null || value === undefined) {
    delete params[name];
  } else {
    params[name] = value;
  }
  return { ...state, params };
}

export interface ValidationResult {
  valid: boolean;
  missing: string[];
  errors: Record<string, string>;
}

export function validate(state: BuilderState): ValidationResult {
  if (state.category === null) {
    return { valid: false, missing: ['category'], errors: {} };
  }
  const meta = CATEGORIES[state.category];
  const missing: string[] = [];
  const errors: Record<string, string> = {};
  for (const field of meta.fields) {
    const value = state.params[field.name];
    if (field.required && (value === undefined || value === '')) {
      missing.push(field.name);
      continue;
    }
    if (value === undefined) continue;
    if (field.kind === 'instance' || field.kind === 'number') {
      const n = Number(value);
      if (!Number.isFinite(n) || (field.kind === 'instance' && (n < 0 || !Number.isInteger(n)))) {
        errors[field.name] = `${field.label} must be a non-negative integer`;
      }
    }
    if (field.kind === 'choice' && field.choices && !field.choices.includes(String(value))) {
      errors[field.name] = `${field.label} must be one of ${field.choices.join(', ')}`;
    }
  }
  return { valid: missing.length === 0 && Object.keys(errors).length === 0, missing, errors };
}

export function canSubmit(state: BuilderState): boolean {
  return validate(state).valid;
}

export function toQuestion(state: BuilderState): Question {
  const check = validate(state);
  if (!check.valid || state.category === null) {
    throw new Error(`invalid question draft: missing ${check.missing.join(', ')}`);
  }
  const params = { ...state.params };
  if ('target_class' in params) params['target_class'] = Number(params['target_class']);
  if ('instance' in params) params['instance'] = Number(params['instance']);
  return { category: state.category, params };
}

/** The server's combination hint, surfaced verbatim next to the artifact. */
export function combinationHint(artifact: Artifact): string {
  return artifact.metadata.plan.hint;
}

/** One click on the suggestion prefills a draft for the follow-up category. */
export function prefillFromSuggestion(artifact: Artifact): BuilderState {
  const followup = artifact.metadata.plan.suggested_followup;
  const draft = selectCategory(emptyBuilder(), followup);
  const model = (artifact.inputs.params ?? {})['model'];
  if (model !== undefined) draft.params['model'] = model;
  const instance = (artifact.inputs.params ?? {})['instance'];
  if (instance !== undefined && CATEGORIES[followup].fields.some((f) => f.name === 'instance')) {
    draft.params['instance'] = instance;
  }
  return { ...draft, prefilledFrom: artifact.metadata.index };
}

export function pickerCategories(role: StakeholderRole): QuestionCategory[] {
  return categoriesForRole(role);
}
