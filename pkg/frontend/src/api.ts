/**
 * Typed client for the transparency hub HTTP API. Every view reads through
 * this module; the dashboard never recomputes merged values on its own.
 */

export interface ProblemDetails {
  code: string;
  message: string;
  field?: string;
  diagnostics?: Array<Record<string, unknown>>;
}

export class ApiError extends Error {
  readonly status: number;
  readonly problem: ProblemDetails;

  constructor(status: number, problem: ProblemDetails) {
    super(problem.message || `request failed with status ${status}`);
    this.status = status;
    this.problem = problem;
  }
}

export interface ServiceSummary {
  id: string;
  name: string;
  origin: string;
  repo_url: string | null;
  current_version: number | null;
  processes_personal_data: boolean;
}

export interface ServiceIndex {
  services: ServiceSummary[];
  no_personal_data: ServiceSummary[];
}

export interface IndicatorView {
  name: string;
  site: string;
  service_local: boolean;
  constituent_fields: string[];
  covered_schemas: string[];
  direct_properties: Array<Record<string, unknown>>;
  effective: Record<string, Array<Record<string, unknown>>>;
  provenance: Record<string, string>;
}

export interface VersionInfo {
  version_number: number;
  content_hash: string;
  received_at: string;
  source: string;
}

export interface ServiceDetail extends ServiceSummary {
  versions: VersionInfo[];
  indicators: IndicatorView[];
}

export interface AggregatedDatum {
  datum_name: string;
  processing_services: string[];
  merged: Record<string, unknown>;
  notes: string[];
  contributions: Array<{
    service: string;
    site: string;
    kind: string;
    value: Record<string, unknown>;
  }>;
}

export interface FlowEdge {
  sender: string;
  receiver: string;
  datum_names: string[];
}

export interface FlowView {
  nodes: string[];
  edges: FlowEdge[];
  closure: Array<[string, string]>;
}

export interface IndexEntry {
  services: string[];
  datum_names: string[];
  contributions: Array<{ service: string; site: string }>;
  descriptions: string[];
}

export interface SpecDiff {
  indicators_added: string[];
  indicators_removed: string[];
  properties_changed: Array<{ site: string; kind: string; before: unknown; after: unknown }>;
}

export interface SystemInfo {
  controller_contact: { name: string; email: string; phone: string; address: string };
  dpo_contact: { name: string; email: string; phone: string; address: string };
  third_country_safeguards: string | null;
  legal_bases: Array<{ basis: string; note: string }>;
  legitimate_interest_note: string | null;
  right_rectification_deletion_portability: boolean;
  right_withdraw_consent: boolean;
  right_lodge_complaint: boolean;
  provision_mandatory: boolean;
  consequences_note: string;
  data_subject_categories: string[];
}

export class HubClient {
  baseUrl: string;
  token: string | null;
  fetchImpl: typeof fetch;

  constructor(baseUrl: string, token: string | null = null, fetchImpl: typeof fetch = fetch) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.token = token;
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { Accept: "application/json" };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      let problem: ProblemDetails;
      try {
        problem = JSON.parse(text) as ProblemDetails;
      } catch {
        problem = { code: "http-error", message: text || response.statusText };
      }
      throw new ApiError(response.status, problem);
    }
    return JSON.parse(text) as T;
  }

  listServices(): Promise<ServiceIndex> {
    return this.request("GET", "/api/services");
  }

  getService(id: string): Promise<ServiceDetail> {
    return this.request("GET", `/api/services/${encodeURIComponent(id)}`);
  }

  registerService(name: string, spec: string, origin = "internal"): Promise<unknown> {
    return this.request("POST", "/api/services", { name, spec, origin });
  }

  addVersion(id: string, spec: string): Promise<{ version: VersionInfo; changed: boolean }> {
    return this.request("POST", `/api/services/${encodeURIComponent(id)}/versions`, { spec });
  }

  async specText(id: string, version: number): Promise<string> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/services/${encodeURIComponent(id)}/versions/${version}`,
    );
    if (!response.ok) {
      throw new ApiError(response.status, { code: "http-error", message: response.statusText });
    }
    return response.text();
  }

  diff(id: string, from: number, to: number): Promise<SpecDiff> {
    return this.request("GET", `/api/services/${encodeURIComponent(id)}/diff?from=${from}&to=${to}`);
  }

  listData(): Promise<{ data: AggregatedDatum[] }> {
    return this.request("GET", "/api/data");
  }

  getDatum(name: string): Promise<AggregatedDatum> {
    return this.request("GET", `/api/data/${encodeURIComponent(name)}`);
  }

  purposes(): Promise<{ purposes: Record<string, IndexEntry> }> {
    return this.request("GET", "/api/purposes");
  }

  recipients(): Promise<{ recipients: Record<string, IndexEntry> }> {
    return this.request("GET", "/api/recipients");
  }

  flow(): Promise<FlowView> {
    return this.request("GET", "/api/flow");
  }

  setLinks(edges: FlowEdge[]): Promise<{ edges: FlowEdge[] }> {
    return this.request("PUT", "/api/links", { edges });
  }

  systemInfo(): Promise<SystemInfo> {
    return this.request("GET", "/api/system-info");
  }

  setSystemInfo(info: Partial<SystemInfo>): Promise<SystemInfo> {
    return this.request("PUT", "/api/system-info", info);
  }

  report(): Promise<Record<string, unknown>> {
    return this.request("GET", "/api/report");
  }

  reportDotUrl(): string {
    return `${this.baseUrl}/api/report.dot`;
  }
}
