import { CheckClient } from "./api.js";
import { EditorView } from "./ui.js";

const SAMPLE = `Let A and B be sets.
We will now show that A∩B ⊆ A∪B.
Proof:
Suppose not.
Let x be an element of A∩B such that x is not an element of A∪B.
Hence x ∈ A and x ∈ B.
Thus x ∈ A∪B.
This is a contradiction.
qed
`;

const root = document.querySelector<HTMLElement>("#app");
if (!root) throw new Error("missing #app element");

// same origin by default; override with ?service=http://host:port
const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "";
const view = new EditorView(root, new CheckClient(base));
view.setText(SAMPLE);
