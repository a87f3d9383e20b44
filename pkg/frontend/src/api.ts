/** Typed client for the study service JSON API. */

export interface SessionStart {
  session_id: string;
  tasks: string[];
}

export interface MemberRow {
  label: string;
  ratings: (number | null)[];
}

export interface GroupView {
  members: MemberRow[];
  options: string[];
}

export interface ReferenceAccuracies {
  lcp_ave: number | null;
  pacp_ave: number | null;
  human_paper_mean: number;
}

export interface Summary {
  answered: number;
  correct: number;
  accuracy: number;
  elapsed_seconds: number;
  reference: ReferenceAccuracies;
}

/** The group was already answered in this session (HTTP 409). */
export class ConflictError extends Error {
  constructor(groupId: string) {
    super(`group ${groupId} already answered`);
    this.name = "ConflictError";
  }
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(`API error ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response;
  }

  async startSession(): Promise<SessionStart> {
    const response = await this.request("/api/sessions", { method: "POST" });
    return (await response.json()) as SessionStart;
  }

  async getGroup(groupId: string): Promise<GroupView> {
    const response = await this.request(`/api/groups/${encodeURIComponent(groupId)}`);
    return (await response.json()) as GroupView;
  }

  async submitPrediction(
    sessionId: string,
    groupId: string,
    optionIndex: number,
  ): Promise<void> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/sessions/${encodeURIComponent(sessionId)}/predictions`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ group_id: groupId, option_index: optionIndex }),
      },
    );
    if (response.status === 409) {
      throw new ConflictError(groupId);
    }
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
  }

  async getSummary(sessionId: string): Promise<Summary> {
    const response = await this.request(
      `/api/sessions/${encodeURIComponent(sessionId)}/summary`,
    );
    return (await response.json()) as Summary;
  }
}
