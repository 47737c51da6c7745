/** JSON payload types mirroring the hxai service wire formats. */

export type QuestionCategory =
  | 'group_disparity'
  | 'causal_influence'
  | 'confounding_distortion'
  | 'global_feature_effect'
  | 'local_attribution'
  | 'global_attribution'
  | 'minimal_change'
  | 'group_perturbation_sensitivity'
  | 'input_sensitivity'
  | 'baseline_resemblance';

export type StakeholderRole = 'individual' | 'regulatory' | 'organizational';

export interface CausalSpec {
  treatment: string;
  outcome: string;
  protected: string[];
  outcome_transform?: string;
}

export interface TreatmentDef {
  mode: 'interventional_transform' | 'observational_contrast';
  feature?: string | null;
  op?: 'scale' | 'set' | 'shift' | null;
  value?: number | null;
  level_p?: unknown;
  level_p0?: unknown;
}

export interface Question {
  category: QuestionCategory;
  params: Record<string, unknown>;
}

export interface MethodPlan {
  category: string;
  calls: string[];
  hint: string;
  suggested_followup: QuestionCategory;
}

export interface QuestionAccepted {
  question_id: string;
  poll: string;
  plan: MethodPlan;
}

export interface QuestionStatus {
  question_id: string;
  status: 'running' | 'done' | 'error';
  artifact_index?: number;
  artifact?: string;
  error?: { error: string; message: string };
}

export interface Artifact {
  kind: string;
  inputs: { category: string; params: Record<string, unknown> };
  values: Record<string, unknown>;
  metadata: {
    seed: number;
    index: number;
    session: string;
    plan: MethodPlan;
    [key: string]: unknown;
  };
}

export interface RatingValues {
  metric: string;
  scores: Record<string, number>;
  baselines: { random: number; biased: number };
  verdicts: Record<
    string,
    { verdict: string; distance_random: number; distance_biased: number; baseline_gap: number }
  >;
}

export interface ShapValues {
  feature_names: string[];
  phis: number[];
  phi0: number;
  method: string;
  output_space: string;
}

export interface PdpValues {
  feature: string;
  kind: string;
  grid: Array<number | string>;
  averages: number[];
}

export interface CounterfactualValues {
  found: boolean;
  changed_features: string[];
  distance: number;
  x_cf: Record<string, unknown>;
  original?: Record<string, unknown>;
}

export interface HypothesisResult {
  model: string;
  ate: number;
  direction: 'increase' | 'decrease' | 'none';
  agreement: 'matched' | 'contradicted' | 'unspecified';
  verdict: string;
  ate_result: Record<string, unknown>;
}

export interface SessionInfo {
  id: string;
  models: string[];
  task: string;
  stakeholder_role: StakeholderRole;
}

export interface ReportSection {
  index: number;
  category: string;
  hint: string;
  artifact: Artifact;
}

export interface Report {
  session: string;
  stakeholder_role: StakeholderRole;
  n_questions: number;
  sections: ReportSection[];
  models: string[];
  causal_spec: CausalSpec;
}
