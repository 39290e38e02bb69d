import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { TEXT } from "./locale.js";
import { competitionsScreen } from "./screens/competitions.js";
import { dossierDetailScreen } from "./screens/dossierDetail.js";
import { dossierListScreen } from "./screens/dossierList.js";
import { reportsScreen } from "./screens/reports.js";
import { supervisorsScreen } from "./screens/supervisors.js";

/** Hash router: #/dossiers, #/dossiers/{id}, #/reports, #/supervisors, #/competitions */
export class App {
  private readonly content: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly win: Window = window,
  ) {
    this.content = el("main", { id: "content" });
  }

  start(): void {
    clear(this.root);
    const nav = el(
      "nav",
      {},
      el("h1", {}, TEXT.appTitle),
      el("a", { href: "#/dossiers" }, TEXT.navDossiers),
      el("a", { href: "#/reports" }, TEXT.navReports),
      el("a", { href: "#/supervisors" }, TEXT.navSupervisors),
      el("a", { href: "#/competitions" }, TEXT.navCompetitions),
    );
    this.root.append(nav, this.content);
    this.win.addEventListener("hashchange", () => void this.route());
    void this.route();
  }

  async route(): Promise<void> {
    const hash = this.win.location.hash || "#/dossiers";
    const parts = hash.replace(/^#\//, "").split("/");
    if (parts[0] === "dossiers" && parts.length > 1) {
      await dossierDetailScreen(this.content, this.client, decodeURIComponent(parts[1]), () =>
        this.navigate("#/dossiers"),
      );
    } else if (parts[0] === "reports") {
      await reportsScreen(this.content, this.client);
    } else if (parts[0] === "supervisors") {
      await supervisorsScreen(this.content, this.client);
    } else if (parts[0] === "competitions") {
      await competitionsScreen(this.content, this.client);
    } else {
      await dossierListScreen(this.content, this.client, {}, (id) =>
        this.navigate(`#/dossiers/${encodeURIComponent(id)}`),
      );
    }
  }

  navigate(hash: string): void {
    if (this.win.location.hash === hash) {
      void this.route();
    } else {
      this.win.location.hash = hash;
    }
  }
}
