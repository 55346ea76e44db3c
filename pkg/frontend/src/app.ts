import { ApiError, HubClient, SpecDiff } from "./api.js";
import { h, mount, VNode } from "./render.js";
import { dataIndexView } from "./views/dataIndex.js";
import { datumDetailView } from "./views/datumDetail.js";
import { flowView, parseLinkLines } from "./views/flow.js";
import { purposeIndexView, recipientIndexView } from "./views/indexes.js";
import { serviceDetailView } from "./views/serviceDetail.js";
import { serviceIndexView } from "./views/serviceIndex.js";
import {
  formValuesFrom,
  submitSystemInfo,
  systemInfoForm,
  SystemInfoFormValues,
} from "./views/systemInfo.js";
import { errorPanel, loadingPanel } from "./views/shared.js";

const NAV = [
  ["#/services", "Services"],
  ["#/data", "Personal data"],
  ["#/purposes", "Purposes"],
  ["#/recipients", "Recipients"],
  ["#/flow", "Data flow"],
  ["#/system", "System info"],
] as const;

interface AppState {
  client: HubClient;
  diffResult: { service: string; from: number; to: number; diff: SpecDiff } | null;
  linkEditorError: string | null;
  systemStatus: string | null;
  systemErrors: Record<string, string>;
  systemValues: SystemInfoFormValues | null;
}

function shell(content: VNode, state: AppState): VNode {
  return h(
    "div",
    { class: "app" },
    h(
      "header",
      {},
      h("h1", {}, "Transparency Hub"),
      h(
        "nav",
        {},
        NAV.map(([href, label]) =>
          h("a", { href, class: location.hash.startsWith(href) ? "active" : "" }, label),
        ),
      ),
      h(
        "form",
        {
          class: "hub-config",
          onsubmit: (event: Event) => {
            event.preventDefault();
            const form = event.target as HTMLFormElement;
            const url = (form.querySelector("input[name=base]") as HTMLInputElement).value;
            const token = (form.querySelector("input[name=token]") as HTMLInputElement).value;
            localStorage.setItem("hub-base-url", url);
            localStorage.setItem("hub-token", token);
            state.client = new HubClient(url, token || null);
            void renderRoute(state);
          },
        },
        h("input", { name: "base", value: state.client.baseUrl, title: "Hub base URL" }),
        h("input", { name: "token", value: state.client.token ?? "", placeholder: "token", type: "password" }),
        h("button", { type: "submit" }, "Connect"),
      ),
    ),
    h("main", { id: "content" }, content),
  );
}

async function routeContent(state: AppState): Promise<VNode> {
  const hash = location.hash || "#/services";
  const [, route, rawArg] = hash.split("/");
  const arg = rawArg ? decodeURIComponent(rawArg) : "";
  const client = state.client;

  if (route === "services" && arg) {
    const detail = await client.getService(arg);
    const diff = state.diffResult?.service === arg ? state.diffResult : null;
    return serviceDetailView(
      detail,
      (version) => `${client.baseUrl}/api/services/${encodeURIComponent(arg)}/versions/${version}`,
      diff,
      (from, to) => {
        void client.diff(arg, from, to).then((result) => {
          state.diffResult = { service: arg, from, to, diff: result };
          void renderRoute(state);
        });
      },
    );
  }
  if (route === "data" && arg) {
    const datum = await client.getDatum(arg);
    return datumDetailView(datum);
  }
  if (route === "data") {
    const body = await client.listData();
    return dataIndexView(body.data);
  }
  if (route === "purposes") {
    const body = await client.purposes();
    return purposeIndexView(body.purposes);
  }
  if (route === "recipients") {
    const body = await client.recipients();
    return recipientIndexView(body.recipients);
  }
  if (route === "flow") {
    const flow = await client.flow();
    return flowView(flow, client.reportDotUrl(), state.linkEditorError, (text) => {
      let edges;
      try {
        edges = parseLinkLines(text);
      } catch (error) {
        state.linkEditorError = (error as Error).message;
        void renderRoute(state);
        return;
      }
      client
        .setLinks(edges)
        .then(() => {
          state.linkEditorError = null;
          void renderRoute(state);
        })
        .catch((error: unknown) => {
          state.linkEditorError =
            error instanceof ApiError ? error.problem.message : String(error);
          void renderRoute(state);
        });
    });
  }
  if (route === "system") {
    const values = state.systemValues ?? formValuesFrom(await client.systemInfo());
    return systemInfoForm(values, state.systemErrors, state.systemStatus, (submitted) => {
      state.systemValues = submitted;
      void submitSystemInfo(client, submitted).then((result) => {
        if (result.ok) {
          state.systemErrors = {};
          state.systemStatus = "Saved.";
          state.systemValues = formValuesFrom(result.stored);
        } else {
          state.systemErrors = result.field ? { [result.field]: result.message } : {};
          state.systemStatus = result.field ? null : result.message;
        }
        void renderRoute(state);
      });
    });
  }
  const index = await client.listServices();
  return serviceIndexView(index);
}

async function renderRoute(state: AppState): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  mount(shell(loadingPanel(), state), root);
  try {
    const content = await routeContent(state);
    mount(shell(content, state), root);
  } catch (error) {
    const message = error instanceof ApiError ? error.problem.message : String(error);
    mount(
      shell(
        errorPanel(message, () => void renderRoute(state)),
        state,
      ),
      root,
    );
  }
}

function boot(): void {
  const base = localStorage.getItem("hub-base-url") ?? "http://127.0.0.1:8080";
  const token = localStorage.getItem("hub-token");
  const state: AppState = {
    client: new HubClient(base, token || null),
    diffResult: null,
    linkEditorError: null,
    systemStatus: null,
    systemErrors: {},
    systemValues: null,
  };
  window.addEventListener("hashchange", () => {
    state.diffResult = null;
    state.linkEditorError = null;
    state.systemStatus = null;
    state.systemErrors = {};
    state.systemValues = null;
    void renderRoute(state);
  });
  void renderRoute(state);
}

if (typeof document !== "undefined" && typeof location !== "undefined") {
  boot();
}
