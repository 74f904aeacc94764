export interface ScorerPlugin {
  name: string;
  score(query: string, doc: string): number;
}

/** Constant scorer for wiring tests; every pair gets 0.0. */
export const echoPlugin: ScorerPlugin = {
  name: "echo",
  score: () => 0.0,
};

function distinctTerms(text: string): Set<string> {
  const terms = new Set<string>();
  for (const raw of text.split(/\s+/)) {
    const term = raw.toLowerCase();
    if (term.length > 0) {
      terms.add(term);
    }
  }
  return terms;
}

/**
 * Sanity baseline: the fraction of distinct query terms that appear in the
 * document. "a b" against "a x" scores 0.5; an empty query scores 0.
 */
export const lexicalOverlapPlugin: ScorerPlugin = {
  name: "overlap",
  score(query: string, doc: string): number {
    const queryTerms = distinctTerms(query);
    if (queryTerms.size === 0) {
      return 0.0;
    }
    const docTerms = distinctTerms(doc);
    let present = 0;
    for (const term of queryTerms) {
      if (docTerms.has(term)) {
        present += 1;
      }
    }
    return present / queryTerms.size;
  },
};

const registry = new Map<string, ScorerPlugin>([
  [echoPlugin.name, echoPlugin],
  [lexicalOverlapPlugin.name, lexicalOverlapPlugin],
]);

export function getPlugin(name: string): ScorerPlugin {
  const plugin = registry.get(name);
  if (plugin === undefined) {
    const known = [...registry.keys()].sort().join(", ");
    throw new Error(`unknown plugin '${name}' (known: ${known})`);
  }
  return plugin;
}
