import type { SentenceInfo } from "./types.js";

export interface SentenceSpan {
	index: number;
	start: number;
	end: number;
}

/** Locate the report's sentences inside the current document text.
 *
 * The report carries each sentence verbatim; the spans are found by
 * sequential search, so they are correct exactly when the text still
 * matches the checked document. A sentence that can no longer be found
 * yields no span (its decorations silently drop — the session clears
 * everything on edit anyway). */
export function locateSentences(
	text: string,
	sentences: readonly SentenceInfo[]
): SentenceSpan[] {
	const spans: SentenceSpan[] = [];
	let cursor = 0;
	for (const sentence of sentences) {
		if (!sentence.raw) continue;
		const at = text.indexOf(sentence.raw, cursor);
		if (at < 0) continue;
		spans.push({ index: sentence.index, start: at, end: at + sentence.raw.length });
		cursor = at + sentence.raw.length;
	}
	return spans;
}
