import type { CheckReport, GrammarSummary } from "./types.js";

export class ServiceError extends Error {
	constructor(
		readonly code: string,
		message: string,
		readonly status: number
	) {
		super(message);
	}
}

/** Signals the service cannot be reached at all (network down, refused). */
export class ServiceUnreachable extends Error {}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin client for the two endpoints the editor consumes. */
export class CheckClient {
	constructor(
		readonly baseUrl: string = "",
		private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init)
	) {}

	async check(text: string, backend?: string): Promise<CheckReport> {
		let response: Response;
		try {
			response = await this.fetchImpl(`${this.baseUrl}/check`, {
				method: "POST",
				headers: { "Content-Type": "application/json" },
				body: JSON.stringify(backend ? { text, backend } : { text })
			});
		} catch (err) {
			throw new ServiceUnreachable(String(err));
		}
		const payload = await response.json();
		if (!response.ok) {
			throw new ServiceError(
				payload.code ?? "ERROR",
				payload.message ?? response.statusText,
				response.status
			);
		}
		return payload as CheckReport;
	}

	/** Returns null when the endpoint is missing — the palette then hides. */
	async grammar(): Promise<GrammarSummary | null> {
		let response: Response;
		try {
			response = await this.fetchImpl(`${this.baseUrl}/grammar`);
		} catch {
			return null;
		}
		if (!response.ok) return null;
		return (await response.json()) as GrammarSummary;
	}
}
