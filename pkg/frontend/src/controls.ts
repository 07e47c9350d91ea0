/** Control panel: parameter pop-up (gear) and rule filters.
 *
 * The pop-up edits a constraints draft; submitting calls generate and the
 * caller replaces every view atomically on success. Filter widgets build a
 * FilterSpecJson (feature existence, per-feature bin values, prediction
 * class) and re-query the rule list.
 */

import type { ConstraintsJson, FilterSpecJson } from "./types.js";

export interface ConstraintsDraft extends ConstraintsJson {
  seed: number;
}

export const DEFAULT_DRAFT: ConstraintsDraft = {
  min_fidelity: 0.85,
  min_coverage: 5,
  max_num_condition: 3,
  num_bin: 3,
  seed: 0,
};

export function validateDraft(d: ConstraintsDraft): string | null {
  if (!(d.min_fidelity > 0 && d.min_fidelity <= 1)) {
    return "min fidelity must be in (0, 1]";
  }
  if (!(Number.isInteger(d.min_coverage) && d.min_coverage >= 1)) {
    return "min coverage must be a positive instance count";
  }
  if (!(Number.isInteger(d.max_num_condition) && d.max_num_condition >= 1)) {
    return "max conditions must be a positive integer";
  }
  if (!(Number.isInteger(d.num_bin) && d.num_bin >= 2)) {
    return "bins must be an integer >= 2";
  }
  return null;
}

export interface FilterWidgets {
  requiredFeatures: Set<string>;
  featureValues: Map<string, Set<number>>;
  predictions: Set<string>;
}

export function emptyFilterWidgets(): FilterWidgets {
  return { requiredFeatures: new Set(), featureValues: new Map(), predictions: new Set() };
}

export function widgetsToSpec(w: FilterWidgets): FilterSpecJson {
  const spec: FilterSpecJson = {};
  if (w.requiredFeatures.size) spec.required_features = [...w.requiredFeatures].sort();
  if (w.featureValues.size) {
    spec.feature_values = {};
    for (const [f, bins] of w.featureValues) {
      if (bins.size) spec.feature_values[f] = [...bins].sort((a, b) => a - b);
    }
    if (Object.keys(spec.feature_values).length === 0) delete spec.feature_values;
  }
  if (w.predictions.size) spec.predictions = [...w.predictions].sort();
  return spec;
}

export function buildParameterForm(
  root: HTMLElement,
  draft: ConstraintsDraft,
  onSubmit: (d: ConstraintsDraft) => void,
): void {
  root.replaceChildren();
  const form = document.createElement("form");
  form.className = "param-form";
  const fields: [keyof ConstraintsDraft, string, number][] = [
    ["min_fidelity", "min fidelity", 0.01],
    ["min_coverage", "min coverage (instances)", 1],
    ["max_num_condition", "max conditions", 1],
    ["num_bin", "bins per feature", 1],
    ["seed", "seed", 1],
  ];
  const inputs = new Map<string, HTMLInputElement>();
  for (const [key, label, step] of fields) {
    const row = document.createElement("label");
    row.textContent = label;
    const input = document.createElement("input");
    input.type = "number";
    input.step = String(step);
    input.value = String(draft[key]);
    input.name = key;
    row.appendChild(input);
    form.appendChild(row);
    inputs.set(key, input);
  }
  const error = document.createElement("p");
  error.className = "form-error";
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Generate";
  form.append(error, submit);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const next: ConstraintsDraft = {
      min_fidelity: Number(inputs.get("min_fidelity")!.value),
      min_coverage: Number(inputs.get("min_coverage")!.value),
      max_num_condition: Number(inputs.get("max_num_condition")!.value),
      num_bin: Number(inputs.get("num_bin")!.value),
      seed: Number(inputs.get("seed")!.value),
    };
    const problem = validateDraft(next);
    if (problem !== null) {
      error.textContent = problem;   // inline validation, no request sent
      return;
    }
    error.textContent = "";
    onSubmit(next);
  });
  root.appendChild(form);
}

export function buildFilterPanel(
  root: HTMLElement,
  featureNames: string[],
  classNames: string[],
  numBins: number,
  binLabels: (f: string) => string[],
  onChange: (spec: FilterSpecJson) => void,
): void {
  root.replaceChildren();
  const widgets = emptyFilterWidgets();
  const fire = () => onChange(widgetsToSpec(widgets));

  const featBox = document.createElement("fieldset");
  featBox.innerHTML = "<legend>feature existence</legend>";
  for (const name of featureNames) {
    const label = document.createElement("label");
    const cb = document.createElement("input");
    cb.type = "checkbox";
    cb.addEventListener("change", () => {
      if (cb.checked) widgets.requiredFeatures.add(name);
      else widgets.requiredFeatures.delete(name);
      fire();
    });
    label.append(cb, document.createTextNode(name));
    featBox.appendChild(label);
  }

  const valueBox = document.createElement("fieldset");
  valueBox.innerHTML = "<legend>feature value</legend>";
  const featSelect = document.createElement("select");
  featSelect.appendChild(new Option("(choose feature)", ""));
  for (const name of featureNames) featSelect.appendChild(new Option(name, name));
  const binHolder = document.createElement("div");
  featSelect.addEventListener("change", () => {
    binHolder.replaceChildren();
    const name = featSelect.value;
    if (!name) return;
    binLabels(name).forEach((labelText, b) => {
      const label = document.createElement("label");
      const cb = document.createElement("input");
      cb.type = "checkbox";
      cb.addEventListener("change", () => {
        if (!widgets.featureValues.has(name)) widgets.featureValues.set(name, new Set());
        const bins = widgets.featureValues.get(name)!;
        if (cb.checked) bins.add(b);
        else bins.delete(b);
        if (!bins.size) widgets.featureValues.delete(name);
        fire();
      });
      label.append(cb, document.createTextNode(labelText));
      binHolder.appendChild(label);
    });
  });
  valueBox.append(featSelect, binHolder);

  const predBox = document.createElement("fieldset");
  predBox.innerHTML = "<legend>model prediction</legend>";
  for (const name of classNames) {
    const label = document.createElement("label");
    const cb = document.createElement("input");
    cb.type = "checkbox";
    cb.addEventListener("change", () => {
      if (cb.checked) widgets.predictions.add(name);
      else widgets.predictions.delete(name);
      fire();
    });
    label.append(cb, document.createTextNode(name));
    predBox.appendChild(label);
  }

  const clear = document.createElement("button");
  clear.type = "button";
  clear.textContent = "clear filters";
  clear.addEventListener("click", () => {
    buildFilterPanel(root, featureNames, classNames, numBins, binLabels, onChange);
    onChange({});
  });

  root.append(featBox, valueBox, predBox, clear);
}
