/** DOM wiring. State logic lives in the view model / builder modules; this
 * file only renders and forwards events. */

import { ApiClient } from './api.js';
import { CATEGORIES } from './categories.js';
import { counterfactualDiff, pdpLine, ratingNumberLine, shapBars } from './charts.js';
import {
  canSubmit,
  pickerCategories,
  selectCategory,
  setParam,
  toQuestion,
  validate,
} from './questionBuilder.js';
import { WorkbenchViewModel, type ArtifactCard } from './viewModel.js';
import { describeResult, scaleSlider, WhatIfPanel } from './whatif.js';
import type { CounterfactualValues, PdpValues, ShapValues, StakeholderRole } from './types.js';

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let client: ApiClient;
let vm: WorkbenchViewModel | null = null;
let whatif: WhatIfPanel | null = null;

function renderBuilder(): void {
  if (!vm) return;
  const picker = $('category-picker');
  picker.innerHTML = '';
  for (const category of pickerCategories(vm.session.stakeholder_role as StakeholderRole)) {
    const meta = CATEGORIES[category];
    const button = document.createElement('button');
    button.textContent = meta.label;
    button.title = meta.blurb;
    button.className = vm.builder.category === category ? 'cat selected' : 'cat';
    button.onclick = () => {
      vm!.builder = selectCategory(vm!.builder, category);
      renderBuilder();
    };
    picker.appendChild(button);
  }

  const form = $('param-form');
  form.innerHTML = '';
  if (vm.builder.category) {
    for (const field of CATEGORIES[vm.builder.category].fields) {
      const row = document.createElement('label');
      row.className = 'param-row';
      row.textContent = `${field.label}${field.required ? ' *' : ''} `;
      let input: HTMLInputElement | HTMLSelectElement;
      if (field.kind === 'choice' && field.choices) {
        input = document.createElement('select');
        for (const choice of ['', ...field.choices]) {
          const opt = document.createElement('option');
          opt.value = choice;
          opt.textContent = choice || '(pick)';
          input.appendChild(opt);
        }
      } else {
        input = document.createElement('input');
        input.type = field.kind === 'instance' || field.kind === 'number' ? 'number' : 'text';
      }
      const existing = vm.builder.params[field.name];
      if (existing !== undefined) input.value = String(existing);
      input.oninput = () => {
        vm!.builder = setParam(vm!.builder, field.name, input.value);
        renderSubmit();
      };
      row.appendChild(input);
      form.appendChild(row);
    }
  }
  renderSubmit();
}

function renderSubmit(): void {
  if (!vm) return;
  const submit = $<HTMLButtonElement>('submit-question');
  submit.disabled = !canSubmit(vm.builder) || vm.submitting;
  const check = validate(vm.builder);
  $('form-errors').textContent = Object.values(check.errors).join('; ');
}

function cardBody(card: ArtifactCard): string {
  const values = card.artifact.values;
  if ('baselines' in values && 'scores' in values) {
    const comparison = vm!.comparison(card);
    if (comparison) return ratingNumberLine(comparison);
  }
  if (card.category === 'local_attribution' || card.category === 'global_attribution') {
    const v = values as unknown as ShapValues & { mean_abs_phi?: number[] };
    const phis = v.phis ?? v.mean_abs_phi ?? [];
    return shapBars(card.index, v.feature_names, phis as number[]);
  }
  if (card.category === 'global_feature_effect') {
    const v = values as unknown as PdpValues;
    if (v.kind === 'numeric') {
      return pdpLine(card.index, v.grid as number[], v.averages);
    }
  }
  if (card.category === 'minimal_change') {
    const v = values as unknown as CounterfactualValues & {
      original?: Record<string, unknown>;
    };
    if (!v.found) return '<p>No counterfactual found within the search budget.</p>';
    const rows = counterfactualDiff(v.original ?? {}, v.x_cf, v.changed_features)
      .filter((r) => r.changed)
      .map(
        (r) =>
          `<tr class="changed"><td>${r.feature}</td><td>${String(r.before)}</td>` +
          `<td>&rarr; ${String(r.after)}</td></tr>`,
      );
    return `<table class="cf-diff">${rows.join('')}</table>` +
      `<p>distance ${v.distance.toPrecision(3)}</p>`;
  }
  return `<pre>${JSON.stringify(values, null, 2).slice(0, 2000)}</pre>`;
}

function renderCards(): void {
  if (!vm) return;
  const gallery = $('artifact-gallery');
  gallery.innerHTML = '';
  for (const card of vm.cards) {
    const div = document.createElement('div');
    div.className = 'card';
    div.dataset['artifactIndex'] = String(card.index);
    div.title = `artifact #${card.index}`;
    const meta = CATEGORIES[card.category as keyof typeof CATEGORIES];
    div.innerHTML =
      `<h3>Q${card.index + 1} - ${meta ? meta.label : card.category}</h3>` +
      cardBody(card) +
      `<p class="hint">${card.hint}</p>`;
    gallery.appendChild(div);
  }
  const suggestion = $('suggestion');
  if (vm.suggestion) {
    suggestion.innerHTML = '';
    const button = document.createElement('button');
    button.textContent = `Suggested next: ${CATEGORIES[vm.suggestion.category].label}`;
    button.onclick = () => {
      vm!.acceptSuggestion();
      renderBuilder();
    };
    suggestion.appendChild(button);
  } else {
    suggestion.textContent = '';
  }
}

async function connect(): Promise<void> {
  const base = $<HTMLInputElement>('base-url').value.replace(/\/$/, '');
  client = new ApiClient(base);
  await client.health();
  const sessionId = $<HTMLInputElement>('session-id').value;
  const report = await client.report(sessionId).catch(() => null);
  const role = (report?.stakeholder_role ?? 'organizational') as StakeholderRole;
  vm = new WorkbenchViewModel(client, {
    id: sessionId,
    models: report?.models ?? [],
    task: 'binary_classification',
    stakeholder_role: role,
  });
  if (report) await vm.hydrate();
  renderBuilder();
  renderCards();
  const feature = $<HTMLInputElement>('whatif-feature').value;
  whatif = new WhatIfPanel(client, sessionId, scaleSlider(feature));
  whatif.onChange(() => renderWhatIf());
  renderWhatIf();
}

function renderWhatIf(): void {
  if (!whatif) return;
  const state = whatif.state;
  $('whatif-value').textContent = `x${state.value.toFixed(2)}`;
  const latest = $('whatif-latest');
  if (state.latest) {
    latest.textContent = `${describeResult(state.latest.result)} ` +
      `(ATE ${state.latest.result.ate.toPrecision(3)})`;
  }
  $('whatif-history').innerHTML = state.history
    .map(
      (entry) =>
        `<li>${entry.treatment.op} ${entry.treatment.feature} ` +
        `${entry.treatment.value}: ATE ${entry.result.ate.toPrecision(3)}</li>`,
    )
    .join('');
}

export function boot(): void {
  $('connect').onclick = () => void connect().catch((err) => {
    $('form-errors').textContent = String(err);
  });
  $('submit-question').onclick = () => {
    if (!vm) return;
    void vm
      .ask(toQuestion(vm.builder))
      .then(() => renderCards())
      .catch(() => renderCards());
  };
  const slider = $<HTMLInputElement>('whatif-slider');
  slider.oninput = () => whatif?.setValue(Number(slider.value));
}

if (typeof document !== 'undefined' && document.getElementById('connect')) {
  boot();
}
