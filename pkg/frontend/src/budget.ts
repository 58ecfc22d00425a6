import { ApiClient } from "./api";
import { StatRegistry, elem } from "./render";
import type { AllocationPayload, SessionPayload } from "./types";

const EPS_MIN = 0.001;
const EPS_MAX = 2;

// Budget panel: one slider per query plus mode, total, and lock
// controls. Every mutation goes to the server and the whole panel
// re-renders from the response, so the numbers a curator sees are the
// allocator's own output, including how responsive mode moved the
// other sliders.
export class BudgetPanel {
  /** Last in-flight mutation; awaited by tests and chained handlers. */
  pending: Promise<void> | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly client: ApiClient,
    private readonly registry: StatRegistry,
    private readonly onUpdate: (session: SessionPayload) => void,
  ) {}

  render(session: SessionPayload): void {
    const alloc = session.allocation;
    this.container.textContent = "";
    this.registry.prune(document);

    const head = elem("div", "budget-head", this.container);
    head.append("mode ");
    const modeEcho = elem("span", "stat mode-echo", head);
    this.registry.bind(modeEcho, session, "allocation.mode");
    const modeSelect = elem("select", "mode-select", head);
    for (const m of ["manual", "responsive"] as const) {
      const opt = elem("option", undefined, modeSelect);
      opt.value = m;
      opt.textContent = m;
    }
    modeSelect.value = alloc.mode;
    modeSelect.disabled = session.finalized;
    modeSelect.addEventListener("change", () => {
      this.pending = this.mutate({
        action: "set_mode",
        mode: modeSelect.value as "manual" | "responsive",
      }, session.id);
    });

    head.append(" total ");
    const totalEcho = elem("span", "stat total-echo", head);
    this.registry.bind(totalEcho, session, "allocation.total_budget");
    const totalInput = elem("input", "total-input", head);
    totalInput.type = "number";
    totalInput.step = "0.1";
    totalInput.min = "0";
    totalInput.max = "8";
    totalInput.value = String(alloc.total_budget);
    totalInput.disabled = session.finalized;
    totalInput.addEventListener("change", () => {
      this.pending = this.mutate(
        { action: "set_total", total: Number(totalInput.value) },
        session.id,
      );
    });

    head.append(" remaining ");
    const remaining = elem("span", "stat remaining-echo", head);
    this.registry.bind(remaining, session, "allocation.remaining_budget");

    const list = elem("div", "sliders", this.container);
    for (const q of session.queries) {
      this.renderRow(list, session, alloc, q.name);
    }

    const noticeBox = elem("ul", "notices", this.container);
    alloc.notices.forEach((_, i) => {
      const li = elem("li", "stat", noticeBox);
      this.registry.bind(li, session, `allocation.notices.${i}`);
    });
  }

  private renderRow(
    list: HTMLElement,
    session: SessionPayload,
    alloc: AllocationPayload,
    name: string,
  ): void {
    const entry = alloc.per_query[name];
    const row = elem("div", "slider-row", list);
    row.dataset.query = name;

    const label = elem("span", "query-name", row);
    label.textContent = name;

    const slider = elem("input", "eps-slider", row);
    slider.type = "range";
    slider.min = String(EPS_MIN);
    slider.max = String(EPS_MAX);
    slider.step = "0.001";
    slider.value = String(entry.epsilon);
    slider.disabled = session.finalized || entry.locked;
    slider.addEventListener("change", () => {
      this.pending = this.mutate(
        { action: "set_epsilon", query: name, value: Number(slider.value) },
        session.id,
      );
    });

    const echo = elem("span", "stat eps-echo", row);
    this.registry.bind(echo, session, `allocation.per_query.${name}.epsilon`);

    const lock = elem("button", "lock-toggle", row);
    lock.textContent = entry.locked ? "unlock" : "lock";
    lock.dataset.locked = String(entry.locked);
    lock.disabled = session.finalized || alloc.mode !== "responsive";
    lock.addEventListener("click", () => {
      this.pending = this.mutate(
        { action: "toggle_lock", query: name },
        session.id,
      );
    });
  }

  private async mutate(
    mutation: Parameters<ApiClient["updateBudget"]>[1],
    sessionId: string,
  ): Promise<void> {
    const session = await this.client.updateBudget(sessionId, mutation);
    this.render(session);
    this.onUpdate(session);
  }
}
