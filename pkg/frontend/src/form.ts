/**
 * Registry-driven form editor for the pipeline config.
 *
 * The service's /v1/registry schema decides which features exist and
 * which properties each accepts; the form is generated from it, so new
 * server-side features appear here without client changes. Property
 * values are edited as JSON fragments ("2.5", {"uniform":[2,4]},
 * {"expr":"radius * 2"}), which keeps the full grammar reachable from
 * the form; the raw-config tab remains the whole-document escape hatch.
 *
 * Every editable region carries a data-path attribute matching the JSON
 * paths the service uses in diagnostics, plus a diagnostic slot, so
 * validation errors anchor to the node that caused them.
 */

import { PropertyField, RegistryFeature } from "./api";
import { anchorFor } from "./diagnostics";

export interface ConfigNode {
  type?: unknown;
  name?: unknown;
  properties?: Record<string, unknown>;
  count?: unknown;
  child?: ConfigNode;
  [key: string]: unknown;
}

export interface ConfigDoc {
  version?: unknown;
  seed?: unknown;
  optics?: unknown;
  pipeline?: ConfigNode[];
  label?: ConfigNode[];
  export?: unknown;
  [key: string]: unknown;
}

export interface FormCallbacks {
  onTreeChange(tree: ConfigDoc): void;
}

type Attrs = Record<string, string | boolean>;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "boolean") {
      if (value) {
        node.setAttribute(key, "");
      }
    } else {
      node.setAttribute(key, value);
    }
  }
  node.append(...children);
  return node;
}

function diagnosticSlot(path: string): HTMLElement {
  return el("div", { class: "diagnostics", "data-diagnostics-for": path });
}

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

/** Features allowed in the two node lists. */
export function pipelineFeatures(registry: RegistryFeature[]): RegistryFeature[] {
  return registry.filter((f) => f.category !== "label");
}

export function labelFeatures(registry: RegistryFeature[]): RegistryFeature[] {
  return registry.filter((f) => f.category === "label");
}

function featureByName(
  registry: RegistryFeature[],
  name: unknown,
): RegistryFeature | undefined {
  return registry.find((f) => f.name === name);
}

/** A starter value for a property added through the form. */
export function seedValue(field: PropertyField): unknown {
  if (field.default !== null && field.default !== undefined) {
    return field.default;
  }
  if (field.choices.length > 0) {
    return field.choices[0];
  }
  switch (field.type) {
    case "int":
    case "float":
      return 0;
    case "bool":
      return false;
    case "str":
      return "";
    default:
      return null;
  }
}

/**
 * A single property value edited as a JSON fragment. Commits on change;
 * unparsable input marks the field and leaves the tree untouched.
 */
function propertyValueInput(
  value: unknown,
  field: PropertyField | undefined,
  onCommit: (value: unknown) => void,
): HTMLElement {
  if (
    field &&
    field.choices.length > 0 &&
    (typeof value === "string" || typeof value === "number")
  ) {
    const select = el("select", { class: "prop-value" });
    for (const choice of field.choices) {
      const option = el("option", { value: JSON.stringify(choice) });
      option.textContent = String(choice);
      if (choice === value) {
        option.selected = true;
      }
      select.append(option);
    }
    select.addEventListener("change", () => {
      onCommit(JSON.parse(select.value));
    });
    return select;
  }

  const input = el("input", {
    class: "prop-value",
    type: "text",
    spellcheck: "false",
  }) as HTMLInputElement;
  input.value = JSON.stringify(value);
  if (field) {
    input.title = field.description;
  }
  input.addEventListener("change", () => {
    try {
      const parsed: unknown = JSON.parse(input.value);
      input.classList.remove("field-error");
      onCommit(parsed);
    } catch {
      input.classList.add("field-error");
    }
  });
  return input;
}

function propertyRow(
  name: string,
  value: unknown,
  field: PropertyField | undefined,
  onCommit: (value: unknown) => void,
  onRemove: (() => void) | null,
): HTMLElement {
  const label = el("span", { class: "prop-name" }, name);
  if (field) {
    label.title = field.description;
  }
  const row = el(
    "div",
    { class: "prop-row" },
    label,
    propertyValueInput(value, field, onCommit),
  );
  if (onRemove) {
    const remove = el("button", { class: "icon", type: "button" }, "×");
    remove.title = `remove ${name}`;
    remove.addEventListener("click", onRemove);
    row.append(remove);
  }
  return row;
}

function addPropertyControl(
  feature: RegistryFeature,
  node: ConfigNode,
  commit: () => void,
): HTMLElement | null {
  const present = new Set(Object.keys(node.properties ?? {}));
  const missing = feature.properties.filter((p) => !present.has(p.name));
  if (missing.length === 0) {
    return null;
  }
  const select = el("select", { class: "add-prop" });
  select.append(el("option", { value: "" }, "add property…"));
  for (const field of missing) {
    const option = el("option", { value: field.name });
    option.textContent = field.name;
    option.title = field.description;
    select.append(option);
  }
  select.addEventListener("change", () => {
    const name = select.value;
    if (!name) {
      return;
    }
    const field = missing.find((f) => f.name === name)!;
    node.properties = { ...(node.properties ?? {}), [name]: seedValue(field) };
    commit();
  });
  return select;
}

function featureSelect(
  allowed: RegistryFeature[],
  current: unknown,
  onPick: (feature: RegistryFeature) => void,
): HTMLElement {
  const select = el("select", { class: "feature-select" });
  let found = false;
  for (const feature of allowed) {
    const option = el("option", { value: feature.name });
    option.textContent = feature.name;
    option.title = feature.description;
    if (feature.name === current) {
      option.selected = true;
      found = true;
    }
    select.append(option);
  }
  if (!found && typeof current === "string") {
    const unknown = el("option", { value: current }, `${current} (unknown)`);
    unknown.selected = true;
    select.append(unknown);
  }
  select.addEventListener("change", () => {
    const feature = allowed.find((f) => f.name === select.value);
    if (feature) {
      onPick(feature);
    }
  });
  return select;
}

/** Swap a node's feature, keeping only properties the new schema knows. */
export function retypeNode(node: ConfigNode, feature: RegistryFeature): void {
  if (feature.kind === "duplicate") {
    node.type = "duplicate";
    node.count = node.count ?? 2;
    node.child = node.child ?? { type: "point" };
    delete node.properties;
    return;
  }
  const known = new Set(feature.properties.map((p) => p.name));
  const kept: Record<string, unknown> = {};
  for (const [key, value] of Object.entries(node.properties ?? {})) {
    if (known.has(key)) {
      kept[key] = value;
    }
  }
  node.type = feature.name;
  node.properties = kept;
  delete node.count;
  delete node.child;
}

function nodeCard(
  node: ConfigNode,
  path: string,
  allowed: RegistryFeature[],
  registry: RegistryFeature[],
  commit: () => void,
  onRemove: (() => void) | null,
): HTMLElement {
  const card = el("div", { class: "node-card", "data-path": path });
  const header = el("div", { class: "node-header" });
  header.append(
    el("span", { class: "node-path" }, path),
    featureSelect(allowed, node.type, (feature) => {
      retypeNode(node, feature);
      commit();
    }),
  );

  const nameInput = el("input", {
    class: "node-name",
    type: "text",
    placeholder: "stream name (optional)",
  }) as HTMLInputElement;
  nameInput.value = typeof node.name === "string" ? node.name : "";
  nameInput.title =
    "names the node's random stream; defaults to its position in the document";
  nameInput.addEventListener("change", () => {
    if (nameInput.value) {
      node.name = nameInput.value;
    } else {
      delete node.name;
    }
    commit();
  });
  header.append(nameInput);

  if (onRemove) {
    const remove = el("button", { class: "icon", type: "button" }, "×");
    remove.title = "remove node";
    remove.addEventListener("click", onRemove);
    header.append(remove);
  }
  card.append(header, diagnosticSlot(path));

  const feature = featureByName(registry, node.type);

  if (feature?.kind === "duplicate" || node.type === "duplicate") {
    card.append(
      propertyRow(
        "count",
        node.count ?? 2,
        feature?.properties.find((p) => p.name === "count"),
        (value) => {
          node.count = value;
          commit();
        },
        null,
      ),
    );
    const childWrap = el("div", { class: "node-child" });
    const child = (node.child ?? { type: "point" }) as ConfigNode;
    node.child = child;
    childWrap.append(
      nodeCard(child, `${path}.child`, allowed, registry, commit, null),
    );
    card.append(childWrap);
    return card;
  }

  const properties = node.properties ?? {};
  for (const [name, value] of Object.entries(properties)) {
    card.append(
      propertyRow(
        name,
        value,
        feature?.properties.find((p) => p.name === name),
        (next) => {
          node.properties = { ...properties, [name]: next };
          commit();
        },
        () => {
          const rest = { ...properties };
          delete rest[name];
          node.properties = rest;
          commit();
        },
      ),
    );
  }
  if (feature) {
    const control = addPropertyControl(feature, node, commit);
    if (control) {
      card.append(control);
    }
  }
  return card;
}

function nodeListSection(
  title: string,
  nodes: ConfigNode[],
  basePath: string,
  allowed: RegistryFeature[],
  registry: RegistryFeature[],
  commit: () => void,
): HTMLElement {
  const section = el("section", {
    class: "form-section",
    "data-path": basePath,
  });
  section.append(el("h3", {}, title), diagnosticSlot(basePath));
  nodes.forEach((node, i) => {
    section.append(
      nodeCard(node, `${basePath}[${i}]`, allowed, registry, commit, () => {
        nodes.splice(i, 1);
        commit();
      }),
    );
  });

  const adder = el("select", { class: "add-node" });
  adder.append(el("option", { value: "" }, "add node…"));
  for (const feature of allowed) {
    const option = el("option", { value: feature.name });
    option.textContent = feature.name;
    option.title = feature.description;
    adder.append(option);
  }
  adder.addEventListener("change", () => {
    const feature = allowed.find((f) => f.name === adder.value);
    if (!feature) {
      return;
    }
    const node: ConfigNode = {};
    retypeNode(node, feature);
    nodes.push(node);
    commit();
  });
  section.append(adder);
  return section;
}

/** A JSON-object sub-editor for sections the registry does not describe. */
function jsonSection(
  title: string,
  path: string,
  value: unknown,
  onCommit: (value: unknown) => void,
): HTMLElement {
  const section = el("section", { class: "form-section", "data-path": path });
  section.append(el("h3", {}, title), diagnosticSlot(path));
  const area = el("textarea", {
    class: "json-area",
    spellcheck: "false",
    rows: "6",
  }) as HTMLTextAreaElement;
  area.value = value === undefined ? "" : JSON.stringify(value, null, 2);
  area.addEventListener("change", () => {
    if (area.value.trim() === "") {
      area.classList.remove("field-error");
      onCommit(undefined);
      return;
    }
    try {
      const parsed: unknown = JSON.parse(area.value);
      area.classList.remove("field-error");
      onCommit(parsed);
    } catch {
      area.classList.add("field-error");
    }
  });
  section.append(area);
  return section;
}

/**
 * Build the whole form for one config tree. The tree is cloned on entry;
 * each committed edit hands a fresh tree to the callback, so the caller's
 * state stays the single source of truth.
 */
export function buildForm(
  tree: ConfigDoc,
  registry: RegistryFeature[],
  callbacks: FormCallbacks,
): HTMLElement {
  const draft = clone(tree);
  const commit = () => {
    const out = clone(draft);
    // The form scaffolds an empty label list for editing; don't let it
    // leak into a document that never declared one.
    if (Array.isArray(out.label) && out.label.length === 0) {
      delete out.label;
    }
    callbacks.onTreeChange(out);
  };

  const root = el("div", { class: "config-form", "data-path": "$" });
  root.append(diagnosticSlot("$"));

  const scene = el("section", {
    class: "form-section",
    "data-path": "$.seed",
  });
  scene.append(el("h3", {}, "seed"), diagnosticSlot("$.seed"));
  const seedInput = el("input", {
    class: "seed-input",
    type: "number",
    step: "1",
  }) as HTMLInputElement;
  seedInput.value = String(draft.seed ?? 0);
  seedInput.addEventListener("change", () => {
    draft.seed = Number(seedInput.value);
    commit();
  });
  scene.append(seedInput);
  root.append(scene);

  root.append(
    jsonSection("optics", "$.optics", draft.optics, (value) => {
      if (value === undefined) {
        delete draft.optics;
      } else {
        draft.optics = value;
      }
      commit();
    }),
  );

  if (!Array.isArray(draft.pipeline)) {
    draft.pipeline = [];
  }
  root.append(
    nodeListSection(
      "pipeline",
      draft.pipeline,
      "$.pipeline",
      pipelineFeatures(registry),
      registry,
      commit,
    ),
  );

  if (!Array.isArray(draft.label)) {
    draft.label = [];
  }
  root.append(
    nodeListSection(
      "label",
      draft.label,
      "$.label",
      labelFeatures(registry),
      registry,
      commit,
    ),
  );

  root.append(
    jsonSection("export", "$.export", draft.export, (value) => {
      if (value === undefined) {
        delete draft.export;
      } else {
        draft.export = value;
      }
      commit();
    }),
  );

  return root;
}

/**
 * Write diagnostics into the slots they anchor to. Returns the ones no
 * rendered slot covers (callers show those in the session-wide list).
 */
export function attachDiagnostics(
  root: HTMLElement,
  diagnostics: { path: string; message: string }[],
): { path: string; message: string }[] {
  const slots = new Map<string, HTMLElement>();
  for (const slot of root.querySelectorAll<HTMLElement>(
    "[data-diagnostics-for]",
  )) {
    slots.set(slot.dataset.diagnosticsFor!, slot);
    slot.replaceChildren();
    slot.classList.remove("active");
  }
  const unanchored: { path: string; message: string }[] = [];
  for (const diagnostic of diagnostics) {
    const best = anchorFor(diagnostic.path, slots.keys());
    if (best === null) {
      unanchored.push(diagnostic);
      continue;
    }
    const slot = slots.get(best)!;
    slot.classList.add("active");
    slot.append(
      el(
        "div",
        { class: "diagnostic" },
        `${diagnostic.path}: ${diagnostic.message}`,
      ),
    );
  }
  return unanchored;
}
