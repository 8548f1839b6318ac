/** Thin typed client over the session API. */

import {
    AvFilterSnapshot,
    AvSnapshot,
    BucketSnapshot,
    ChainsSnapshot,
    Command,
    CommandResult,
    EntryDetail,
    InvalidationEvent,
    Pane,
    PositionsSnapshot,
    ProjectionSnapshot,
    SelectionSnapshot,
    SpecSnapshot,
    SurfaceSnapshot,
    TopologySnapshot,
} from "./model.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    constructor(public status: number, detail: string) {
        super(detail);
    }
}

export class SessionApi {
    constructor(
        private baseUrl: string,
        public sessionId: string,
        private fetchImpl: FetchLike = (url, init) => fetch(url, init),
    ) {}

    static async discover(baseUrl: string, fetchImpl?: FetchLike): Promise<SessionApi> {
        const doFetch = fetchImpl ?? ((url: string, init?: RequestInit) => fetch(url, init));
        const response = await doFetch(`${baseUrl}/sessions`);
        const body = await response.json();
        if (!body.sessions.length) {
            throw new ApiError(404, "no session loaded; start the server with --bundle");
        }
        return new SessionApi(baseUrl, body.sessions[0], doFetch);
    }

    private async get<T>(resource: string): Promise<T> {
        const response = await this.fetchImpl(
            `${this.baseUrl}/sessions/${this.sessionId}/${resource}`,
        );
        if (!response.ok) {
            throw new ApiError(response.status, await response.text());
        }
        return (await response.json()) as T;
    }

    topology(): Promise<TopologySnapshot> {
        return this.get("topology");
    }

    spec(): Promise<SpecSnapshot> {
        return this.get("spec");
    }

    avGraph(): Promise<AvSnapshot> {
        return this.get("av-graph");
    }

    surface(): Promise<SurfaceSnapshot> {
        return this.get("surface");
    }

    chains(target: string): Promise<ChainsSnapshot> {
        return this.get(`chains?target=${encodeURIComponent(target)}`);
    }

    positions(pane: Pane): Promise<PositionsSnapshot> {
        return this.get(`positions/${pane}`);
    }

    bucket(): Promise<BucketSnapshot> {
        return this.get("bucket");
    }

    selection(): Promise<SelectionSnapshot> {
        return this.get("selection");
    }

    avFilter(): Promise<AvFilterSnapshot> {
        return this.get("av-filter");
    }

    projection(): Promise<ProjectionSnapshot> {
        return this.get("projection");
    }

    entry(nativeId: string): Promise<EntryDetail> {
        return this.get(`entries/${encodeURIComponent(nativeId)}`);
    }

    async command(command: Command): Promise<CommandResult> {
        const response = await this.fetchImpl(
            `${this.baseUrl}/sessions/${this.sessionId}/commands`,
            {
                method: "POST",
                headers: { "Content-Type": "application/json" },
                body: JSON.stringify(command),
            },
        );
        if (!response.ok) {
            throw new ApiError(response.status, await response.text());
        }
        return (await response.json()) as CommandResult;
    }

    /** Subscribe to the push channel; events name the resources to refetch. */
    events(onEvent: (event: InvalidationEvent) => void): WebSocket {
        const wsUrl = this.baseUrl.replace(/^http/, "ws");
        const socket = new WebSocket(`${wsUrl}/sessions/${this.sessionId}/events`);
        socket.onmessage = (message) => {
            onEvent(JSON.parse(message.data) as InvalidationEvent);
        };
        return socket;
    }
}
