/** Question-category metadata: parameter forms, labels, role presets. */

import type { QuestionCategory, StakeholderRole } from './types.js';

export type FieldKind = 'model' | 'feature' | 'instance' | 'number' | 'choice' | 'treatment' | 'perturbation' | 'features';

export interface ParamField {
  name: string;
  kind: FieldKind;
  required: boolean;
  label: string;
  choices?: string[];
  default?: unknown;
}

export interface CategoryMeta {
  category: QuestionCategory;
  label: string;
  blurb: string;
  fields: ParamField[];
}

const MODEL: ParamField = { name: 'model', kind: 'model', required: false, label: 'Model' };

export const CATEGORIES: Record<QuestionCategory, CategoryMeta> = {
  group_disparity: {
    category: 'group_disparity',
    label: 'Do outcomes differ across groups?',
    blurb: 'Weighted rejection score across protected-group pairs.',
    fields: [MODEL],
  },
  causal_influence: {
    category: 'causal_influence',
    label: 'Does an input causally influence the outcome?',
    blurb: 'Average treatment effect of an intervention or contrast.',
    fields: [MODEL, { name: 'treatment', kind: 'treatment', required: true, label: 'Treatment' }],
  },
  confounding_distortion: {
    category: 'confounding_distortion',
    label: 'Is the effect distorted by confounding?',
    blurb: 'DIE%: unadjusted vs deconfounded effect magnitude.',
    fields: [
      MODEL,
      { name: 'treatment', kind: 'treatment', required: true, label: 'Treatment' },
      {
        name: 'adjust',
        kind: 'choice',
        required: false,
        label: 'Adjustment',
        choices: ['gcomp', 'psm'],
        default: 'gcomp',
      },
    ],
  },
  global_feature_effect: {
    category: 'global_feature_effect',
    label: 'How does a feature influence predictions overall?',
    blurb: 'Partial dependence curve.',
    fields: [MODEL, { name: 'feature', kind: 'feature', required: true, label: 'Feature' }],
  },
  local_attribution: {
    category: 'local_attribution',
    label: 'Which features drove this prediction?',
    blurb: 'Per-feature Shapley attributions for one row.',
    fields: [MODEL, { name: 'instance', kind: 'instance', required: true, label: 'Row index' }],
  },
  global_attribution: {
    category: 'global_attribution',
    label: 'Which features matter globally?',
    blurb: 'Mean |attribution| over a sample of rows.',
    fields: [MODEL],
  },
  minimal_change: {
    category: 'minimal_change',
    label: 'What minimal change flips the decision?',
    blurb: 'Counterfactual search under mutability constraints.',
    fields: [
      MODEL,
      { name: 'instance', kind: 'instance', required: true, label: 'Row index' },
      {
        name: 'target_class',
        kind: 'choice',
        required: false,
        label: 'Target class',
        choices: ['1', '0'],
        default: '1',
      },
      { name: 'mutable_only', kind: 'features', required: false, label: 'Changeable features' },
    ],
  },
  group_perturbation_sensitivity: {
    category: 'group_perturbation_sensitivity',
    label: 'Does one group degrade more under noisy input?',
    blurb: 'DIE% with the perturbation as treatment.',
    fields: [
      MODEL,
      { name: 'perturbation', kind: 'perturbation', required: true, label: 'Perturbation' },
    ],
  },
  input_sensitivity: {
    category: 'input_sensitivity',
    label: 'How sensitive is the model to an input change?',
    blurb: 'ATE with the perturbation as treatment.',
    fields: [
      MODEL,
      { name: 'perturbation', kind: 'perturbation', required: true, label: 'Perturbation' },
    ],
  },
  baseline_resemblance: {
    category: 'baseline_resemblance',
    label: 'Does behavior resemble a biased or random model?',
    blurb: 'Rating against auto-built random and biased baselines.',
    fields: [
      {
        name: 'metric',
        kind: 'choice',
        required: true,
        label: 'Metric',
        choices: ['wrs', 'ate', 'die'],
        default: 'wrs',
      },
      { name: 'treatment', kind: 'treatment', required: false, label: 'Treatment' },
    ],
  },
};

/** Role presets pre-filter the picker; all categories stay reachable. */
export const ROLE_PRESETS: Record<StakeholderRole, QuestionCategory[]> = {
  individual: ['baseline_resemblance', 'local_attribution', 'minimal_change', 'causal_influence'],
  regulatory: [
    'group_disparity',
    'baseline_resemblance',
    'confounding_distortion',
    'global_feature_effect',
    'causal_influence',
  ],
  organizational: [
    'group_disparity',
    'baseline_resemblance',
    'confounding_distortion',
    'global_attribution',
    'group_perturbation_sensitivity',
    'input_sensitivity',
    'global_feature_effect',
  ],
};

export function categoriesForRole(role: StakeholderRole): QuestionCategory[] {
  return ROLE_PRESETS[role];
}
