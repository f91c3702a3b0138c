/**
 * Anchoring of service diagnostics to editor nodes.
 *
 * The service reports problems with JSON-path strings like
 * "$.pipeline[1].properties.sigma". The form editor tags each node card
 * with the path it edits ("$", "$.optics", "$.pipeline[1]", ...); a
 * diagnostic attaches to the deepest rendered node whose path is a
 * segment-boundary prefix of the diagnostic's path, so a property error
 * lands on its node card even when the property itself has no dedicated
 * anchor.
 */

import { Diagnostic } from "./state";

/** True when `prefix` covers `path` up to a segment boundary. */
export function isPathPrefix(prefix: string, path: string): boolean {
  if (!path.startsWith(prefix)) {
    return false;
  }
  if (path.length === prefix.length) {
    return true;
  }
  const next = path[prefix.length];
  return next === "." || next === "[";
}

/**
 * The anchor a diagnostic should attach to: the longest available path
 * that prefixes the diagnostic path, or null when none matches (the
 * caller then shows the diagnostic in the session-wide list).
 */
export function anchorFor(
  diagnosticPath: string,
  availableAnchors: Iterable<string>,
): string | null {
  let best: string | null = null;
  for (const anchor of availableAnchors) {
    if (!isPathPrefix(anchor, diagnosticPath)) {
      continue;
    }
    if (best === null || anchor.length > best.length) {
      best = anchor;
    }
  }
  return best;
}

/** Group diagnostics by the anchor they attach to ("" = unanchored). */
export function groupByAnchor(
  diagnostics: Diagnostic[],
  availableAnchors: Iterable<string>,
): Map<string, Diagnostic[]> {
  const anchors = Array.from(availableAnchors);
  const groups = new Map<string, Diagnostic[]>();
  for (const diagnostic of diagnostics) {
    const anchor = anchorFor(diagnostic.path, anchors) ?? "";
    const bucket = groups.get(anchor);
    if (bucket) {
      bucket.push(diagnostic);
    } else {
      groups.set(anchor, [diagnostic]);
    }
  }
  return groups;
}

export function describeDiagnostic(diagnostic: Diagnostic): string {
  return `${diagnostic.path}: ${diagnostic.message}`;
}
