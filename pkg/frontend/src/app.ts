import { ApiClient } from "./api";
import { BudgetPanel } from "./budget";
import { renderDotplot } from "./dotplot";
import { HopPlayer } from "./hop";
import { StatRegistry, elem } from "./render";
import { renderRiskCurve } from "./riskcurve";
import type {
  CiSet,
  ReleaseResponse,
  SessionPayload,
  WhatifPayload,
  WhatifSubgroup,
} from "./types";

const WHATIF_FRAMES = 8;
const CI_KEYS = ["50", "80", "95"];

export class App {
  readonly registry: StatRegistry;
  readonly budget: BudgetPanel;
  private session: SessionPayload;
  private players: HopPlayer[] = [];
  private activeQuery: string | null = null;
  /** Last in-flight navigation; awaited by tests and chained handlers. */
  pending: Promise<void> | null = null;

  private readonly sessionPanel: HTMLElement;
  private readonly budgetPanel: HTMLElement;
  private readonly tabBar: HTMLElement;
  private readonly whatifPanel: HTMLElement;
  private readonly releasePanel: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly client: ApiClient,
    session: SessionPayload,
    registry = new StatRegistry(),
  ) {
    this.session = session;
    this.registry = registry;
    root.textContent = "";
    this.sessionPanel = elem("section", "session-panel", root);
    this.budgetPanel = elem("section", "budget-panel", root);
    this.tabBar = elem("nav", "tabs", root);
    this.whatifPanel = elem("section", "whatif-panel", root);
    this.releasePanel = elem("section", "release-panel", root);
    this.budget = new BudgetPanel(
      this.budgetPanel,
      this.client,
      this.registry,
      (updated) => {
        this.session = updated;
        this.renderSessionHead();
        if (this.activeQuery !== null) {
          this.pending = this.showWhatif(this.activeQuery);
        }
      },
    );
  }

  async start(): Promise<void> {
    this.renderSessionHead();
    this.budget.render(this.session);
    this.renderTabs();
    const first = this.session.queries[0];
    if (first) {
      await this.showWhatif(first.name);
    }
  }

  private renderSessionHead(): void {
    const s = this.session;
    this.sessionPanel.textContent = "";
    this.registry.prune(document);
    const h = elem("h1", undefined, this.sessionPanel);
    h.append("dataset ");
    const name = elem("span", "stat", h);
    this.registry.bind(name, s, "dataset.name");
    h.append(" with ");
    const n = elem("span", "stat dataset-n", h);
    this.registry.bind(n, s, "dataset.n");
    h.append(" records");
    const sub = elem("p", "session-meta", this.sessionPanel);
    sub.append("session seed fingerprint ");
    const fp = elem("span", "stat", sub);
    this.registry.bind(fp, s, "seed_fingerprint");
    if (s.finalized) {
      elem("p", "finalized-banner", this.sessionPanel).textContent =
        "release finalized; budgets are closed";
    }

    const btn = elem("button", "finalize-button", this.sessionPanel);
    btn.textContent = "finalize release";
    btn.disabled = false;
    btn.addEventListener("click", () => {
      this.pending = this.finalize();
    });
  }

  private renderTabs(): void {
    this.tabBar.textContent = "";
    for (const q of this.session.queries) {
      const tab = elem("button", "tab", this.tabBar);
      tab.textContent = q.name;
      tab.dataset.query = q.name;
      tab.addEventListener("click", () => {
        this.pending = this.showWhatif(q.name);
      });
    }
  }

  async showWhatif(queryName: string): Promise<void> {
    if (this.session.finalized) {
      return;
    }
    const payload = await this.client.whatif(this.session.id, {
      query: queryName,
      frames: WHATIF_FRAMES,
    });
    this.activeQuery = queryName;
    for (const t of this.tabBar.querySelectorAll<HTMLElement>(".tab")) {
      t.classList.toggle("active", t.dataset.query === queryName);
    }
    this.renderWhatif(payload);
  }

  renderWhatif(w: WhatifPayload): void {
    this.stopPlayers();
    this.whatifPanel.textContent = "";
    this.registry.prune(document);

    const head = elem("div", "whatif-head", this.whatifPanel);
    head.append("previewing ");
    const qName = elem("span", "stat", head);
    this.registry.bind(qName, w, "query");
    head.append(" at epsilon ");
    const eps = elem("span", "stat whatif-eps", head);
    this.registry.bind(eps, w, "epsilon");
    head.append(" ; budget left if committed ");
    const rem = elem("span", "stat whatif-remaining", head);
    this.registry.bind(rem, w, "remaining_budget");

    const riskBox = elem("div", "risk-panel", this.whatifPanel);
    renderRiskCurve(
      riskBox,
      this.registry,
      w,
      "risk_curve.points",
      w.risk_curve.points,
      { root: w, path: "risk_point", point: w.risk_point },
    );

    const grid = elem("div", "subgroups", this.whatifPanel);
    w.subgroups.forEach((sg, i) => {
      this.renderSubgroup(grid, w, sg, i);
    });
  }

  private renderSubgroup(
    grid: HTMLElement,
    w: WhatifPayload,
    sg: WhatifSubgroup,
    i: number,
  ): void {
    const base = `subgroups.${i}`;
    const card = elem("div", "subgroup-card", grid);
    card.dataset.label = sg.label;

    const title = elem("h3", undefined, card);
    const label = elem("span", "stat", title);
    this.registry.bind(label, w, `${base}.label`);

    const facts = elem("p", "facts", card);
    facts.append("group size ");
    this.registry.bind(elem("span", "stat", facts), w, `${base}.group_size`);
    facts.append(" ; exact count ");
    this.registry.bind(
      elem("span", "stat exact-count", facts),
      w,
      `${base}.exact_count`,
    );
    facts.append(" ; exact proportion ");
    this.registry.bind(
      elem("span", "stat", facts),
      w,
      `${base}.exact_proportion`,
    );

    const dotBox = elem("div", "dotplot-box", card);
    elem("h4", undefined, dotBox).textContent = "noised count distribution";
    renderDotplot(dotBox, this.registry, w, `${base}.dotplot_count`, sg.dotplot_count);
    const note = elem("p", "dot-note", dotBox);
    note.append("each dot carries probability ");
    this.registry.bind(
      elem("span", "stat", note),
      w,
      `${base}.dotplot_count.per_dot_probability`,
    );

    const hopBox = elem("div", "hop-box", card);
    elem("h4", undefined, hopBox).textContent = "one draw at a time";
    const frameCount = elem("span", "stat hop-count", hopBox);
    const frameProp = elem("span", "stat hop-proportion", hopBox);
    const hopCis = elem("div", "hop-cis", hopBox);
    const playBtn = elem("button", "hop-toggle", hopBox);
    playBtn.textContent = "pause";

    const player = new HopPlayer(sg.hop.frames, w.frame_rate, (_, k) => {
      const fi = k % sg.hop.frames.length;
      const fBase = `${base}.hop.frames.${fi}`;
      this.registry.bind(frameCount, w, `${fBase}.count`);
      this.registry.bind(frameProp, w, `${fBase}.proportion`);
      if (sg.hop.frames[fi].private_cis) {
        this.renderCiSet(
          hopCis,
          w,
          `${fBase}.private_cis`,
          sg.hop.frames[fi].private_cis as CiSet,
        );
      }
    });
    playBtn.addEventListener("click", () => {
      if (player.playing) {
        player.stop();
        playBtn.textContent = "play";
      } else {
        player.start();
        playBtn.textContent = "pause";
      }
    });
    this.players.push(player);
    player.start();

    if (w.extrapolation && sg.nonprivate_cis && sg.private_ci_preview) {
      const ciBox = elem("div", "ci-box", card);
      elem("h4", undefined, ciBox).textContent =
        "intervals (proportion scale)";
      elem("p", undefined, ciBox).textContent = "without privacy noise:";
      this.renderCiSet(
        elem("div", "ci-nonprivate", ciBox),
        w,
        `${base}.nonprivate_cis`,
        sg.nonprivate_cis,
      );
      elem("p", undefined, ciBox).textContent = "private preview:";
      this.renderCiSet(
        elem("div", "ci-private", ciBox),
        w,
        `${base}.private_ci_preview`,
        sg.private_ci_preview,
      );
    }
  }

  private renderCiSet(
    box: HTMLElement,
    root: unknown,
    basePath: string,
    cis: CiSet,
  ): void {
    box.textContent = "";
    this.registry.prune(document);
    const table = elem("table", "ci-table", box);
    for (const key of CI_KEYS) {
      if (!(key in cis)) {
        continue;
      }
      const tr = elem("tr", undefined, table);
      elem("td", "ci-level-name", tr).textContent = `${key}%`;
      this.registry.bind(
        elem("td", "stat ci-lower", tr),
        root,
        `${basePath}.${key}.lower`,
      );
      this.registry.bind(
        elem("td", "stat ci-upper", tr),
        root,
        `${basePath}.${key}.upper`,
      );
    }
  }

  async finalize(): Promise<void> {
    const resp = await this.client.release(this.session.id);
    this.stopPlayers();
    this.renderRelease(resp);
  }

  renderRelease(resp: ReleaseResponse): void {
    this.releasePanel.textContent = "";
    this.registry.prune(document);
    const doc = resp.document;
    const head = elem("h2", undefined, this.releasePanel);
    head.textContent = resp.already_finalized
      ? "release document (already finalized)"
      : "release document";

    const meta = elem("p", "release-meta", this.releasePanel);
    meta.append("created ");
    this.registry.bind(elem("span", "stat", meta), resp, "document.created_at");
    meta.append(" ; overall risk ");
    this.registry.bind(
      elem("span", "stat overall-risk", meta),
      resp,
      "document.overall_risk.risk",
    );
    meta.append(" at total epsilon ");
    this.registry.bind(
      elem("span", "stat", meta),
      resp,
      "document.overall_risk.epsilon",
    );

    doc.queries.forEach((q, qi) => {
      const block = elem("div", "release-query", this.releasePanel);
      const h = elem("h3", undefined, block);
      this.registry.bind(
        elem("span", "stat", h),
        resp,
        `document.queries.${qi}.query`,
      );
      h.append(" spent ");
      this.registry.bind(
        elem("span", "stat eps-spent", h),
        resp,
        `document.queries.${qi}.epsilon_spent`,
      );
      const table = elem("table", "release-table", block);
      const header = elem("tr", undefined, table);
      for (const col of ["subgroup", "size", "released count", "released proportion"]) {
        elem("th", undefined, header).textContent = col;
      }
      q.subgroups.forEach((sg, si) => {
        const sBase = `document.queries.${qi}.subgroups.${si}`;
        const tr = elem("tr", undefined, table);
        this.registry.bind(elem("td", "stat", tr), resp, `${sBase}.label`);
        this.registry.bind(
          elem("td", "stat", tr),
          resp,
          `${sBase}.group_size`,
        );
        this.registry.bind(
          elem("td", "stat released-count", tr),
          resp,
          `${sBase}.released_count`,
        );
        this.registry.bind(
          elem("td", "stat", tr),
          resp,
          `${sBase}.released_proportion`,
        );
        if (sg.private_cis) {
          const ciRow = elem("tr", "ci-row", table);
          const cell = elem("td", undefined, ciRow);
          cell.colSpan = 4;
          this.renderCiSet(cell, resp, `${sBase}.private_cis`, sg.private_cis);
        }
      });
    });
  }

  stopPlayers(): void {
    for (const p of this.players) {
      p.stop();
    }
    this.players = [];
  }
}
