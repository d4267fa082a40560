/** DOM wiring: a textarea with a highlight backdrop, a verdict banner,
 * goal badges, the item list with countermodel tables, and the cue
 * palette. All state lives in EditorSession; this layer only renders it. */
import { CheckClient } from "./api.js";
import { insertSnippet, paletteGroups } from "./palette.js";
import { Decoration, EditorSession } from "./session.js";
import type { CountermodelJson, ReportItem } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
	tag: K,
	className?: string,
	text?: string
): HTMLElementTagNameMap[K] {
	const node = document.createElement(tag);
	if (className) node.className = className;
	if (text !== undefined) node.textContent = text;
	return node;
}

function escapeHtml(s: string): string {
	return s
		.replace(/&/g, "&amp;")
		.replace(/</g, "&lt;")
		.replace(/>/g, "&gt;");
}

export class EditorView {
	private readonly session: EditorSession;
	private readonly textarea: HTMLTextAreaElement;
	private readonly backdrop: HTMLDivElement;
	private readonly banner: HTMLDivElement;
	private readonly goals: HTMLDivElement;
	private readonly itemList: HTMLDivElement;
	private readonly palette: HTMLDivElement;

	constructor(
		private readonly root: HTMLElement,
		private readonly client: CheckClient
	) {
		this.session = new EditorSession(client);

		this.banner = el("div", "banner banner-idle", "Write a proof, then press Check (Ctrl+Enter).");
		const editorWrap = el("div", "editor-wrap");
		this.backdrop = el("div", "backdrop");
		this.textarea = el("textarea", "editor");
		this.textarea.spellcheck = false;
		editorWrap.append(this.backdrop, this.textarea);

		const controls = el("div", "controls");
		const checkButton = el("button", "check-button", "Check");
		const backendSelect = el("select", "backend-select");
		for (const backend of ["rule", "llm", "llm-mock"]) {
			const option = el("option", undefined, backend);
			option.value = backend;
			backendSelect.append(option);
		}
		controls.append(checkButton, backendSelect);

		this.goals = el("div", "goals");
		this.itemList = el("div", "items");
		this.palette = el("div", "palette palette-hidden");

		const main = el("div", "main");
		main.append(this.banner, controls, editorWrap, this.goals, this.itemList);
		root.append(main, this.palette);

		checkButton.addEventListener("click", () => void this.check());
		this.textarea.addEventListener("keydown", (event) => {
			if ((event.ctrlKey || event.metaKey) && event.key === "Enter") {
				event.preventDefault();
				void this.check();
			}
		});
		this.textarea.addEventListener("input", () => {
			this.session.setText(this.textarea.value);
			this.render();
		});
		this.textarea.addEventListener("scroll", () => {
			this.backdrop.scrollTop = this.textarea.scrollTop;
			this.backdrop.scrollLeft = this.textarea.scrollLeft;
		});
		backendSelect.addEventListener("change", () => {
			this.session.setBackend(backendSelect.value);
		});

		void this.loadPalette();
		this.render();
	}

	setText(text: string): void {
		this.textarea.value = text;
		this.session.setText(text);
		this.render();
	}

	async check(): Promise<void> {
		this.session.setText(this.textarea.value);
		this.render();
		await this.session.runCheck();
		this.render();
	}

	private async loadPalette(): Promise<void> {
		const summary = await this.client.grammar();
		if (!summary) return; // endpoint missing: palette stays hidden
		this.palette.classList.remove("palette-hidden");
		this.palette.append(el("h2", undefined, "Cue phrases"));
		for (const group of paletteGroups(summary)) {
			this.palette.append(el("h3", undefined, group.kind));
			for (const cue of group.cues) {
				const button = el("button", "cue", cue);
				button.addEventListener("click", () => {
					const { text, cursor } = insertSnippet(
						this.textarea.value,
						this.textarea.selectionStart ?? this.textarea.value.length,
						cue
					);
					this.textarea.value = text;
					this.textarea.focus();
					this.textarea.setSelectionRange(cursor, cursor);
					this.session.setText(text);
					this.render();
				});
				this.palette.append(button);
			}
		}
	}

	private render(): void {
		this.renderBanner();
		this.renderBackdrop();
		this.renderGoals();
		this.renderItems();
	}

	private renderBanner(): void {
		const banner = this.session.banner;
		this.banner.className = "banner";
		switch (banner.kind) {
			case "idle":
				this.banner.classList.add("banner-idle");
				this.banner.textContent = "Write a proof, then press Check (Ctrl+Enter).";
				break;
			case "checking":
				this.banner.classList.add("banner-idle");
				this.banner.textContent = "Checking…";
				break;
			case "service-down":
				this.banner.classList.add("banner-down");
				this.banner.textContent = `Service unavailable: ${banner.message}`;
				break;
			case "verdict":
				this.banner.classList.add(`banner-${banner.verdict.toLowerCase()}`);
				this.banner.textContent = banner.verdict;
				break;
		}
	}

	private renderBackdrop(): void {
		const text = this.textarea.value;
		const markers: { at: number; html: string }[] = [];
		const bySpan = new Map<string, Decoration[]>();
		for (const deco of this.session.decorations) {
			const key = `${deco.start}:${deco.end}`;
			const bucket = bySpan.get(key) ?? [];
			bucket.push(deco);
			bySpan.set(key, bucket);
		}
		let html = "";
		let cursor = 0;
		const spans = [...bySpan.entries()]
			.map(([key, decos]) => {
				const first = decos[0]!;
				return { start: first.start, end: first.end, decos };
			})
			.sort((a, b) => a.start - b.start);
		for (const span of spans) {
			if (span.start < cursor) continue;
			const worst = ["error", "warning", "info", "success"].find((s) =>
				span.decos.some((d) => d.severity === s)
			);
			html += escapeHtml(text.slice(cursor, span.start));
			const title = span.decos.map((d) => `${d.code}: ${d.message}`).join("\n");
			html += `<mark class="deco deco-${worst}" title="${escapeHtml(title)}">` +
				escapeHtml(text.slice(span.start, span.end)) + "</mark>";
			cursor = span.end;
		}
		html += escapeHtml(text.slice(cursor));
		this.backdrop.innerHTML = html + "\n";
	}

	private renderGoals(): void {
		this.goals.textContent = "";
		for (const goal of this.session.goals) {
			const badge = el(
				"span",
				goal.ok ? "goal-badge goal-ok" : "goal-badge goal-open",
				goal.ok ? `✓ goal (sentence ${goal.sentenceIndex + 1})` : `✗ goal (sentence ${goal.sentenceIndex + 1})`
			);
			badge.title = goal.message;
			this.goals.append(badge);
		}
	}

	private renderItems(): void {
		this.itemList.textContent = "";
		const report = this.session.lastReport;
		if (!report) return;
		report.items.forEach((item) => {
			const row = el("div", `item item-${item.severity}`);
			const where = item.index === null ? "document" : `sentence ${item.index + 1}`;
			row.append(el("span", "item-where", where));
			row.append(el("span", "item-code", item.code));
			row.append(el("span", "item-message", item.message));
			if (item.malRules?.length) {
				row.append(el("span", "item-malrules", item.malRules.join(", ")));
			}
			if (item.countermodel) {
				row.append(renderCountermodel(item.countermodel));
			}
			this.itemList.append(row);
		});
	}
}

/** The point × set membership grid of a countermodel. */
export function renderCountermodel(cm: CountermodelJson): HTMLTableElement {
	const table = document.createElement("table");
	table.className = "countermodel";
	const sets = Object.keys(cm.sets).sort();
	const head = table.insertRow();
	head.insertCell().textContent = "point";
	for (const s of sets) head.insertCell().textContent = s;
	cm.points.forEach((point, i) => {
		const row = table.insertRow();
		row.insertCell().textContent = point;
		for (const s of sets) {
			row.insertCell().textContent = cm.sets[s]?.[i] ? "∈" : "∉";
		}
	});
	for (const [elem, point] of Object.entries(cm.elements)) {
		const row = table.insertRow();
		const cell = row.insertCell();
		cell.colSpan = sets.length + 1;
		cell.textContent = `${elem} = ${point}`;
	}
	if (cm.points.length === 0) {
		const row = table.insertRow();
		const cell = row.insertCell();
		cell.colSpan = sets.length + 1;
		cell.textContent = "(empty universe)";
	}
	return table;
}
