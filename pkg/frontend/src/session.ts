import { CheckClient, ServiceError, ServiceUnreachable } from "./api.js";
import { locateSentences, SentenceSpan } from "./spans.js";
import type { CheckReport, ReportItem, Severity, Verdict } from "./types.js";

/** One inline decoration. Decorations are 1:1 with sentence-anchored
 * report items: `itemIndex` points back into `report.items`. */
export interface Decoration {
	itemIndex: number;
	sentenceIndex: number;
	start: number;
	end: number;
	severity: Severity;
	code: string;
	message: string;
}

export interface GoalBadge {
	itemIndex: number;
	sentenceIndex: number;
	ok: boolean;
	message: string;
}

export type Banner =
	| { kind: "idle" }
	| { kind: "checking" }
	| { kind: "verdict"; verdict: Verdict }
	| { kind: "service-down"; message: string };

/** Pure mapping from a report plus the checked text to decorations.
 * Document-level items (index null) are not decorations; they surface in
 * the banner area. */
export function decorationsFromReport(
	report: CheckReport,
	text: string
): Decoration[] {
	const spanByIndex = new Map<number, SentenceSpan>();
	for (const span of locateSentences(text, report.sentences)) {
		spanByIndex.set(span.index, span);
	}
	const out: Decoration[] = [];
	report.items.forEach((item, itemIndex) => {
		if (item.index === null) return;
		const span = spanByIndex.get(item.index);
		if (!span) return;
		out.push({
			itemIndex,
			sentenceIndex: item.index,
			start: span.start,
			end: span.end,
			severity: item.severity,
			code: item.code,
			message: item.message
		});
	});
	return out;
}

export function goalBadges(report: CheckReport): GoalBadge[] {
	const out: GoalBadge[] = [];
	report.items.forEach((item, itemIndex) => {
		if (item.code !== "GOAL_OK" && item.code !== "GOAL_OPEN") return;
		out.push({
			itemIndex,
			sentenceIndex: item.index ?? -1,
			ok: item.code === "GOAL_OK",
			message: item.message
		});
	});
	return out;
}

/** The editor's state: document text, selected backend, the last report
 * and what is derived from it. Checks are explicit; only the newest
 * in-flight check may publish its result (an older response arriving
 * late is dropped, never rendered). Editing clears all decorations. */
export class EditorSession {
	text = "";
	backend = "rule";
	lastReport: CheckReport | null = null;
	decorations: Decoration[] = [];
	goals: GoalBadge[] = [];
	banner: Banner = { kind: "idle" };
	private checkedText: string | null = null;
	private generation = 0;

	constructor(private readonly client: CheckClient) {}

	setText(text: string): void {
		if (text === this.text) return;
		this.text = text;
		// stale decorations never outlive an edit
		this.lastReport = null;
		this.checkedText = null;
		this.decorations = [];
		this.goals = [];
		if (this.banner.kind === "verdict") this.banner = { kind: "idle" };
	}

	setBackend(backend: string): void {
		this.backend = backend;
	}

	async runCheck(): Promise<void> {
		const generation = ++this.generation;
		const text = this.text;
		this.banner = { kind: "checking" };
		let report: CheckReport;
		try {
			report = await this.client.check(text, this.backend);
		} catch (err) {
			if (generation !== this.generation) return; // superseded
			const message =
				err instanceof ServiceError || err instanceof ServiceUnreachable
					? err.message
					: String(err);
			// non-blocking: the document is untouched, only the banner notes it
			this.banner = { kind: "service-down", message };
			return;
		}
		if (generation !== this.generation) return; // a newer check exists
		if (text !== this.text) return; // edited while in flight
		this.lastReport = report;
		this.checkedText = text;
		this.decorations = decorationsFromReport(report, text);
		this.goals = goalBadges(report);
		this.banner = { kind: "verdict", verdict: report.verdict };
	}

	/** Items that are not anchored to a sentence (transport trouble etc). */
	documentItems(): ReportItem[] {
		if (!this.lastReport) return [];
		return this.lastReport.items.filter((item) => item.index === null);
	}
}
