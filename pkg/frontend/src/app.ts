/** Browser bootstrap: wires the API client and renderer to the page. */

import { ApiError, ScreeningClient } from "./api.js";
import { entriesFromReply, entriesFromUserTurn, renderEntry } from "./view.js";

export function mountChat(root: HTMLElement, client: ScreeningClient): void {
  root.innerHTML = `
    <div id="transcript" class="transcript" data-testid="transcript"></div>
    <form id="composer" class="composer">
      <input id="input" type="text" placeholder="Type your answer..." autocomplete="off" aria-label="Message">
      <button id="send" type="submit">Send</button>
    </form>`;
  const transcript = root.querySelector<HTMLElement>("#transcript")!;
  const form = root.querySelector<HTMLFormElement>("#composer")!;
  const input = root.querySelector<HTMLInputElement>("#input")!;
  const send = root.querySelector<HTMLButtonElement>("#send")!;

  let sessionId: string | null = null;

  const append = (html: string) => {
    transcript.insertAdjacentHTML("beforeend", html);
    transcript.scrollTop = transcript.scrollHeight;
  };
  const appendError = (message: string) => {
    append(`<div class="msg error">${message}</div>`);
  };

  const start = async () => {
    try {
      const created = await client.createSession();
      sessionId = created.session_id;
      for (const entry of entriesFromReply(created.messages)) {
        append(renderEntry(entry));
      }
    } catch (error) {
      appendError(error instanceof ApiError ? error.message : "Could not reach the server.");
    }
  };

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text || sessionId === null) return;
    input.value = "";
    send.disabled = true;
    for (const entry of entriesFromUserTurn(text)) {
      append(renderEntry(entry));
    }
    try {
      const reply = await client.sendMessage(sessionId, text);
      for (const entry of entriesFromReply(reply)) {
        append(renderEntry(entry));
      }
    } catch (error) {
      appendError(error instanceof ApiError ? error.message : "Could not reach the server.");
    } finally {
      send.disabled = false;
      input.focus();
    }
  });

  void start();
}

declare global {
  interface Window {
    PPD_API_BASE?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = window.PPD_API_BASE ?? "";
  mountChat(document.getElementById("app")!, new ScreeningClient(base));
}
