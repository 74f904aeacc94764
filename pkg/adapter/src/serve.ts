import { createInterface } from "node:readline";
import type { Readable, Writable } from "node:stream";
import { once } from "node:events";

import type { ScorerPlugin } from "./plugins.js";

interface ScoreRequest {
  qid: string;
  query: string;
  docid: string;
  doc: string;
}

function parseRequest(line: string): ScoreRequest {
  let payload: unknown;
  try {
    payload = JSON.parse(line);
  } catch {
    throw new Error("not valid JSON");
  }
  if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
    throw new Error("not a JSON object");
  }
  const record = payload as Record<string, unknown>;
  for (const field of ["qid", "query", "docid", "doc"] as const) {
    if (typeof record[field] !== "string") {
      throw new Error(`missing or non-string field '${field}'`);
    }
  }
  return record as unknown as ScoreRequest;
}

async function writeLine(output: Writable, line: string): Promise<void> {
  if (!output.write(line + "\n")) {
    await once(output, "drain");
  }
}

/**
 * Run the request loop: one response line per well-formed request line,
 * in arrival order. Malformed lines are reported on the error stream and
 * skipped; the returned exit code is nonzero when any line was skipped.
 */
export async function serve(
  plugin: ScorerPlugin,
  input: Readable,
  output: Writable,
  errors: Writable,
): Promise<number> {
  const reader = createInterface({ input, crlfDelay: Infinity });
  let lineNumber = 0;
  let skipped = 0;
  for await (const raw of reader) {
    lineNumber += 1;
    if (raw.trim().length === 0) {
      continue;
    }
    let request: ScoreRequest;
    try {
      request = parseRequest(raw);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      errors.write(`error: protocol: request line ${lineNumber}: ${reason}\n`);
      skipped += 1;
      continue;
    }
    const score = plugin.score(request.query, request.doc);
    if (!Number.isFinite(score)) {
      errors.write(
        `error: protocol: plugin '${plugin.name}' returned a non-finite score ` +
          `for (${request.qid}, ${request.docid})\n`,
      );
      skipped += 1;
      continue;
    }
    const response = JSON.stringify({
      qid: request.qid,
      docid: request.docid,
      score,
    });
    await writeLine(output, response);
  }
  return skipped === 0 ? 0 : 2;
}
