/** What-if panel: feature sliders map to scale/shift interventions, submits
 * are debounced so rapid drags keep at most one request in flight, and every
 * tried hypothesis accumulates in a history strip. */

import type { ApiClient } from './api.js';
import { debounceAsync, type DebouncedAsync } from './debounce.js';
import type { HypothesisResult, TreatmentDef } from './types.js';

export interface SliderSpec {
  feature: string;
  mode: 'scale' | 'shift';
  min: number;
  max: number;
  step: number;
  neutral: number; // scale 1.0 / shift 0.0
}

export function scaleSlider(feature: string, min = 0.25, max = 2.0, step = 0.05): SliderSpec {
  return { feature, mode: 'scale', min, max, step, neutral: 1.0 };
}

export function shiftSlider(feature: string, min: number, max: number, step: number): SliderSpec {
  return { feature, mode: 'shift', min, max, step, neutral: 0.0 };
}

export function sliderToTreatment(spec: SliderSpec, value: number): TreatmentDef {
  return {
    mode: 'interventional_transform',
    feature: spec.feature,
    op: spec.mode,
    value,
  };
}

export interface WhatIfEntry {
  treatment: TreatmentDef;
  result: HypothesisResult;
}

export interface WhatIfState {
  slider: SliderSpec;
  value: number;
  latest: WhatIfEntry | null;
  history: WhatIfEntry[];
  error: string | null;
  busy: boolean;
}

/** Renders a verdict line for the latest hypothesis card. */
export function describeResult(result: HypothesisResult): string {
  if (result.direction === 'none') {
    return 'No effect: the intervention leaves the average prediction unchanged (ATE 0).';
  }
  const arrow = result.direction === 'increase' ? 'raises' : 'lowers';
  return `${arrow} the average prediction by ${Math.abs(result.ate).toPrecision(3)}`;
}

export class WhatIfPanel {
  readonly state: WhatIfState;
  private readonly submitDebounced: DebouncedAsync<number>;
  private listeners: Array<(state: WhatIfState) => void> = [];

  constructor(
    private readonly client: ApiClient,
    private readonly sessionId: string,
    slider: SliderSpec,
    private readonly model?: string,
    waitMs = 300,
    schedule?: (cb: () => void, ms: number) => unknown,
    cancel?: (handle: unknown) => void,
  ) {
    this.state = {
      slider,
      value: slider.neutral,
      latest: null,
      history: [],
      error: null,
      busy: false,
    };
    this.submitDebounced = debounceAsync(
      (value: number) => this.submit(value),
      waitMs,
      schedule,
      cancel,
    );
  }

  onChange(listener: (state: WhatIfState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    this.listeners.forEach((l) => l(this.state));
  }

  /** Slider drag handler: debounced, single-flight. */
  setValue(value: number): void {
    this.state.value = value;
    this.submitDebounced(value);
    this.emit();
  }

  /** Resolves when the debounced pipeline drains (tests and form submit). */
  settle(): Promise<void> {
    return this.submitDebounced.flush();
  }

  requestInFlight(): boolean {
    return this.submitDebounced.inFlight();
  }

  private async submit(value: number): Promise<void> {
    const treatment = sliderToTreatment(this.state.slider, value);
    this.state.busy = true;
    this.emit();
    try {
      const result = await this.client.postHypothesis(this.sessionId, {
        model: this.model,
        treatment_def: treatment,
      });
      const entry: WhatIfEntry = { treatment, result };
      this.state.latest = entry;
      this.state.history = [...this.state.history, entry];
      this.state.error = null;
    } catch (err) {
      this.state.error = err instanceof Error ? err.message : String(err);
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }
}
