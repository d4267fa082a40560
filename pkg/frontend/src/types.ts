/** Wire types of the checking service: exactly the CheckReport JSON shape
 * of `POST /check` and the cue summary of `GET /grammar`. The editor adds
 * nothing to these — every pixel it renders traces back to a field here. */

export type Verdict = "Accepted" | "AcceptedWithWarnings" | "Rejected";

export type Severity = "error" | "warning" | "info" | "success";

export interface SentenceInfo {
	index: number;
	raw: string;
	kind: string | null;
	formalization: string | null;
	status: string;
}

export interface CountermodelJson {
	points: string[];
	sets: Record<string, boolean[]>;
	elements: Record<string, string>;
}

export interface ReportItem {
	index: number | null;
	severity: Severity;
	code: string;
	message: string;
	countermodel?: CountermodelJson;
	malRules?: string[];
}

export interface CheckReport {
	verdict: Verdict;
	sentences: SentenceInfo[];
	items: ReportItem[];
}

export interface GrammarSummary {
	cues: Record<string, string[]>;
}
