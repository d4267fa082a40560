import type { GrammarSummary } from "./types.js";

export interface PaletteGroup {
	kind: string;
	cues: string[];
}

const GROUP_ORDER = ["declaration", "assumption", "claim", "goal", "annotation"];

/** Order the /grammar summary for display; unknown groups keep their
 * server order after the known ones. */
export function paletteGroups(summary: GrammarSummary): PaletteGroup[] {
	const seen = new Set<string>();
	const out: PaletteGroup[] = [];
	for (const kind of GROUP_ORDER) {
		const cues = summary.cues[kind];
		if (cues && cues.length) {
			out.push({ kind, cues });
			seen.add(kind);
		}
	}
	for (const [kind, cues] of Object.entries(summary.cues)) {
		if (!seen.has(kind) && cues.length) out.push({ kind, cues });
	}
	return out;
}

/** Insert a cue template at the cursor; "…" becomes the place to type. */
export function insertSnippet(
	text: string,
	cursor: number,
	cue: string
): { text: string; cursor: number } {
	const needsSpace = cursor > 0 && !/\s$/.test(text.slice(0, cursor));
	const snippet = (needsSpace ? " " : "") + cue;
	const ellipsis = snippet.indexOf("…");
	const inserted = text.slice(0, cursor) + snippet + text.slice(cursor);
	const newCursor = cursor + (ellipsis >= 0 ? ellipsis : snippet.length);
	return { text: inserted, cursor: newCursor };
}
