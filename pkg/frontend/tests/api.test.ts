/** The typed client must hit the documented endpoints and hand back the
 *  server's bytes untouched (replayed from the recorded exchange). */

import { describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { Exchange } from "./exchange.js";

const BASE = "http://test";

function client(exchange = new Exchange()): SessionApi {
    return new SessionApi(BASE, "SID", exchange.fakeFetch(BASE));
}

describe("SessionApi", () => {
    it("returns snapshots byte-equal to the recorded responses", async () => {
        const exchange = new Exchange();
        const api = client(exchange);
        expect(await api.topology()).toEqual(
            exchange.response("GET", "/sessions/SID/topology"),
        );
        expect(await api.surface()).toEqual(
            exchange.response("GET", "/sessions/SID/surface"),
        );
        expect(await api.bucket()).toEqual(
            exchange.response("GET", "/sessions/SID/bucket"),
        );
        expect(await api.positions("spec")).toEqual(
            exchange.response("GET", "/sessions/SID/positions/spec"),
        );
    });

    it("url-encodes chain targets", async () => {
        const api = client();
        const chains = await api.chains("Primary Application Processor");
        expect(chains.target).toBe("Primary Application Processor");
        expect(chains.chains.length).toBeGreaterThanOrEqual(3);
    });

    it("posts commands with the exact wire body and returns invalidations", async () => {
        const api = client();
        const result = await api.command({
            command: "select", pane: "spec", id: "Imagery Radio Module",
        });
        expect(result.ok).toBe(true);
        expect(result.invalidated).toContain("selection");
        expect(result.invalidated).toContain("av-filter");
    });

    it("serves successive reads of a mutated resource in recorded order", async () => {
        const exchange = new Exchange();
        const api = client(exchange);
        const before = await api.selection();
        expect(before.selection).toEqual([]);
        const after = await api.selection();
        expect(after.selection.length).toBeGreaterThan(0);
    });

    it("raises ApiError for unrecorded (unknown) requests", async () => {
        const api = client();
        await expect(api.entry("CVE-0000-0000")).rejects.toMatchObject({ status: 404 });
    });
});
