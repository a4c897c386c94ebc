import type {
  BallotInput,
  EvaluationReport,
  GroupFeedback,
  HierarchyResponse,
  SensitivityResponse,
  SessionInfo,
  WeightsResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : `HTTP ${status}`);
  }
}

export interface PutResult<T> {
  /** True when the server rejected the write because our revision was stale. */
  conflict: boolean;
  body: T | null;
}

/**
 * Client for the assessment service. Tracks the session revision so every
 * mutating call carries the revision the server last told us about. On a 409
 * the client refreshes its revision from the server and reports the conflict;
 * it never replays the rejected write.
 */
export class ApiClient {
  sessionId = "";
  revision = 0;

  constructor(
    readonly baseUrl = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<unknown> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const payload = await resp.json().catch(() => null);
    if (!resp.ok) {
      throw new ApiError(resp.status, payload?.detail ?? payload);
    }
    return payload;
  }

  private track(info: SessionInfo): void {
    this.sessionId = info.session_id;
    this.revision = info.revision;
  }

  /** Re-read the server's current revision after a conflict. */
  async refresh(): Promise<void> {
    const info = (await this.request(
      "GET",
      `/api/sessions/${this.sessionId}`,
    )) as SessionInfo;
    this.track(info);
  }

  private async mutate<T extends SessionInfo>(
    method: string,
    path: string,
    body?: Record<string, unknown>,
  ): Promise<PutResult<T>> {
    try {
      const out = (await this.request(method, path, body)) as T;
      this.track(out);
      return { conflict: false, body: out };
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await this.refresh();
        return { conflict: true, body: null };
      }
      throw err;
    }
  }

  async createSession(document?: unknown): Promise<SessionInfo> {
    const body = document === undefined ? {} : { document };
    const info = (await this.request(
      "POST",
      "/api/sessions",
      body,
    )) as SessionInfo;
    this.track(info);
    return info;
  }

  async loadProject(name: string): Promise<SessionInfo> {
    const info = (await this.request("POST", "/api/sessions/load", {
      name,
    })) as SessionInfo;
    this.track(info);
    return info;
  }

  async saveProject(name: string): Promise<PutResult<SessionInfo>> {
    return this.mutate("POST", `/api/sessions/${this.sessionId}/save`, {
      name,
    });
  }

  async listProjects(): Promise<string[]> {
    const out = (await this.request("GET", "/api/projects")) as {
      projects: string[];
    };
    return out.projects;
  }

  async hierarchy(): Promise<HierarchyResponse> {
    return (await this.request(
      "GET",
      `/api/sessions/${this.sessionId}/hierarchy`,
    )) as HierarchyResponse;
  }

  async weights(): Promise<WeightsResponse> {
    return (await this.request(
      "GET",
      `/api/sessions/${this.sessionId}/weights`,
    )) as WeightsResponse;
  }

  async groupJudgments(groupId: string): Promise<GroupFeedback> {
    return (await this.request(
      "GET",
      `/api/sessions/${this.sessionId}/judgments/${groupId}`,
    )) as GroupFeedback;
  }

  async putJudgment(
    groupId: string,
    i: number,
    j: number,
    value: number,
  ): Promise<PutResult<GroupFeedback>> {
    return this.mutate(
      "PUT",
      `/api/sessions/${this.sessionId}/judgments/${groupId}`,
      { revision: this.revision, i, j, value },
    );
  }

  async deleteJudgment(
    groupId: string,
    i: number,
    j: number,
  ): Promise<PutResult<GroupFeedback>> {
    const path =
      `/api/sessions/${this.sessionId}/judgments/${groupId}` +
      `/cells/${i}/${j}?revision=${this.revision}`;
    return this.mutate("DELETE", path);
  }

  async putBallots(
    providerId: string,
    ballots: BallotInput[],
  ): Promise<PutResult<SessionInfo>> {
    return this.mutate("PUT", `/api/sessions/${this.sessionId}/ballots`, {
      revision: this.revision,
      provider_id: providerId,
      ballots,
    });
  }

  async evaluate(options?: {
    method?: string;
    operator?: string;
    force?: boolean;
  }): Promise<EvaluationReport> {
    return (await this.request(
      "POST",
      `/api/sessions/${this.sessionId}/evaluate`,
      options ?? {},
    )) as EvaluationReport;
  }

  async sensitivity(
    nodes: string[],
    deltas: number[],
  ): Promise<SensitivityResponse> {
    return (await this.request(
      "POST",
      `/api/sessions/${this.sessionId}/sensitivity`,
      { nodes, deltas },
    )) as SensitivityResponse;
  }
}
