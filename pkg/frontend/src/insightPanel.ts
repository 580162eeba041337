// AI insight panel: automatic feedback text plus the editable transcript.
// Editing the transcript and confirming immediately regenerates the insight.

import { SessionConnection } from "./connection";
import { SessionState } from "./state";

export class InsightPanel {
  readonly element: HTMLElement;
  readonly insightText: HTMLElement;
  readonly spinner: HTMLElement;
  readonly errorBox: HTMLElement;
  readonly transcriptEditor: HTMLTextAreaElement;
  readonly updateButton: HTMLButtonElement;
  private userIsEditing = false;

  constructor(state: SessionState, connection: SessionConnection, doc: Document) {
    this.element = doc.createElement("section");
    this.element.className = "insight-panel";

    const heading = doc.createElement("h2");
    heading.textContent = "AI Insight";
    this.element.appendChild(heading);

    this.spinner = doc.createElement("div");
    this.spinner.className = "spinner";
    this.spinner.textContent = "thinking…";
    this.element.appendChild(this.spinner);

    this.insightText = doc.createElement("div");
    this.insightText.className = "insight-text";
    this.element.appendChild(this.insightText);

    this.errorBox = doc.createElement("div");
    this.errorBox.className = "insight-error";
    const retry = doc.createElement("button");
    retry.textContent = "Retry";
    // regenerating from the current transcript is the retry path
    retry.addEventListener("click", () =>
      connection.send("edit_transcript", { text: state.transcriptText() }));
    this.errorBox.appendChild(doc.createElement("span"));
    this.errorBox.appendChild(retry);
    this.element.appendChild(this.errorBox);

    const transcriptHeading = doc.createElement("h3");
    transcriptHeading.textContent = "Transcript";
    this.element.appendChild(transcriptHeading);

    this.transcriptEditor = doc.createElement("textarea");
    this.transcriptEditor.className = "transcript-editor";
    this.transcriptEditor.addEventListener("focus", () => (this.userIsEditing = true));
    this.transcriptEditor.addEventListener("blur", () => (this.userIsEditing = false));
    this.element.appendChild(this.transcriptEditor);

    this.updateButton = doc.createElement("button");
    this.updateButton.textContent = "Update transcript";
    this.updateButton.className = "update-transcript";
    this.updateButton.addEventListener("click", () => {
      this.userIsEditing = false;
      connection.send("edit_transcript", { text: this.transcriptEditor.value });
    });
    this.element.appendChild(this.updateButton);

    state.subscribe(() => this.sync(state));
    this.sync(state);
  }

  private sync(state: SessionState): void {
    this.element.classList.toggle("hidden", state.phase !== "CHATBOT_OPEN");
    this.spinner.classList.toggle("hidden", !state.insight.pending);
    this.insightText.textContent = state.insight.text;
    const failed = state.insight.error !== null;
    this.errorBox.classList.toggle("hidden", !failed);
    if (failed) {
      (this.errorBox.firstChild as HTMLElement).textContent =
        `insight failed (${state.insight.error}) `;
    }
    if (!this.userIsEditing) {
      this.transcriptEditor.value = state.transcriptText();
    }
  }
}
