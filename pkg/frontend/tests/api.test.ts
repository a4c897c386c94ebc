import { beforeEach, describe, expect, it, vi } from "vitest";
import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

const info = (revision: number) => ({
  session_id: "s1",
  revision,
  dirty: true,
});

describe("ApiClient", () => {
  let fetchMock: ReturnType<typeof vi.fn>;
  let client: ApiClient;

  beforeEach(() => {
    fetchMock = vi.fn();
    client = new ApiClient("http://svc", fetchMock as unknown as typeof fetch);
  });

  it("tracks the session id and revision from createSession", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(200, info(0)));
    await client.createSession();
    expect(client.sessionId).toBe("s1");
    expect(client.revision).toBe(0);
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("http://svc/api/sessions");
    expect(init.method).toBe("POST");
  });

  it("sends its current revision with each judgment write", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(200, info(0)));
    await client.createSession();
    fetchMock.mockResolvedValueOnce(
      jsonResponse(200, { ...info(1), group: "g", complete: false, cells: [] }),
    );
    const result = await client.putJudgment("g", 0, 1, 3);
    expect(result.conflict).toBe(false);
    const [url, init] = fetchMock.mock.calls[1];
    expect(url).toBe("http://svc/api/sessions/s1/judgments/g");
    expect(JSON.parse(init.body)).toEqual({ revision: 0, i: 0, j: 1, value: 3 });
    expect(client.revision).toBe(1);
  });

  it("on 409 refreshes the revision and does not replay the write", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(200, info(0)));
    await client.createSession();
    fetchMock.mockResolvedValueOnce(
      jsonResponse(409, { detail: "stale revision" }),
    );
    fetchMock.mockResolvedValueOnce(jsonResponse(200, { ...info(5) }));
    const result = await client.putJudgment("g", 0, 1, 3);
    expect(result.conflict).toBe(true);
    expect(result.body).toBeNull();
    expect(client.revision).toBe(5);
    // exactly one PUT then one GET; the PUT is never retried
    expect(fetchMock).toHaveBeenCalledTimes(3);
    expect(fetchMock.mock.calls[2][0]).toBe("http://svc/api/sessions/s1");
    expect(fetchMock.mock.calls[2][1].method).toBe("GET");
  });

  it("raises ApiError with the server detail on other failures", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(200, info(0)));
    await client.createSession();
    fetchMock.mockResolvedValueOnce(
      jsonResponse(422, { detail: "value 11 is not on the 1..9 comparison scale" }),
    );
    await expect(client.putJudgment("g", 0, 1, 11)).rejects.toThrowError(
      ApiError,
    );
  });

  it("passes the revision as a query parameter on judgment deletes", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(200, info(3)));
    await client.createSession();
    fetchMock.mockResolvedValueOnce(
      jsonResponse(200, { ...info(4), group: "g", complete: false, cells: [] }),
    );
    await client.deleteJudgment("g", 0, 2);
    const [url, init] = fetchMock.mock.calls[1];
    expect(url).toBe("http://svc/api/sessions/s1/judgments/g/cells/0/2?revision=3");
    expect(init.method).toBe("DELETE");
  });

  it("uploads ballots with provider id and revision", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(200, info(2)));
    await client.createSession();
    fetchMock.mockResolvedValueOnce(
      jsonResponse(200, { ...info(3), provider_id: "p", ballot_count: 1 }),
    );
    await client.putBallots("p", [
      { expert_id: "e1", factor_id: "f1", level: "A" },
    ]);
    const body = JSON.parse(fetchMock.mock.calls[1][1].body);
    expect(body).toEqual({
      revision: 2,
      provider_id: "p",
      ballots: [{ expert_id: "e1", factor_id: "f1", level: "A" }],
    });
  });

  it("posts sensitivity requests verbatim", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(200, info(0)));
    await client.createSession();
    fetchMock.mockResolvedValueOnce(
      jsonResponse(200, { base_ranking: ["x"], stable: true, entries: [] }),
    );
    const resp = await client.sensitivity(["c1"], [-0.1, 0.1]);
    expect(resp.stable).toBe(true);
    const [url, init] = fetchMock.mock.calls[1];
    expect(url).toBe("http://svc/api/sessions/s1/sensitivity");
    expect(JSON.parse(init.body)).toEqual({ nodes: ["c1"], deltas: [-0.1, 0.1] });
  });
});
