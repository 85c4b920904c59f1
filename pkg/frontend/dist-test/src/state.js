/**
 * Console state: region choice, weight settings, budget, the clicked
 * "current" allocation, and the what-if history strip. Fully serializable
 * to URL query params so a configured view is a shareable link.
 */
export const WEIGHT_MIN = 1e-8;
export const WEIGHT_MAX = 1e6;
export const HISTORY_LIMIT = 8;
/** Importance ladders for decision makers; "custom" means a raw lambda. */
export const COVERAGE_LEVELS = {
    less: 1e-6,
    somewhat: 1e-4,
    important: 1e-2,
    very: 1e0,
};
export const EQUITY_LEVELS = {
    less: 1e-4,
    somewhat: 1e-2,
    important: 1e0,
    very: 1e2,
};
export function initialState() {
    return {
        regionId: null,
        coverage: { level: "important", raw: COVERAGE_LEVELS.important },
        equity: { level: "important", raw: EQUITY_LEVELS.important },
        k: 3,
        targetFraction: 0.1,
        seed: 0,
        currentSites: [],
        lastJobId: null,
        history: [],
    };
}
/** Weight controls clamp into the recommended magnitude window. */
export function clampWeight(value) {
    if (!Number.isFinite(value) || value <= 0)
        return WEIGHT_MIN;
    return Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, value));
}
export function setLevel(ladder, level) {
    if (level in ladder)
        return { level, raw: ladder[level] };
    return { level: "custom", raw: clampWeight(Number(level)) };
}
export function setRawWeight(value) {
    return { level: "custom", raw: clampWeight(value) };
}
/** k is clamped into 1..n for the selected region. */
export function clampBudget(k, n) {
    if (!Number.isFinite(k))
        return 1;
    return Math.min(Math.max(1, Math.round(k)), Math.max(1, n));
}
export function toggleSite(state, siteId) {
    const current = state.currentSites.includes(siteId)
        ? state.currentSites.filter((s) => s !== siteId)
        : [...state.currentSites, siteId];
    return { ...state, currentSites: current };
}
export function pushHistory(state, entry) {
    const history = [entry, ...state.history].slice(0, HISTORY_LIMIT);
    return { ...state, history };
}
export function recordJobResult(state, job) {
    if (!job.result)
        return state;
    return pushHistory(state, {
        seed: state.seed,
        coverageWeight: state.coverage.raw,
        equityWeight: state.equity.raw,
        k: state.k,
        siteIds: job.result.result.site_ids,
        combined: job.result.result.scores.combined,
    });
}
export function scoreRequest(state, siteIds) {
    return {
        region_id: state.regionId ?? "",
        site_ids: siteIds,
        k: siteIds.length,
        lambda1: state.coverage.raw,
        lambda3: state.equity.raw,
        target_fraction: state.targetFraction,
    };
}
export function jobRequest(state) {
    return {
        region_id: state.regionId ?? "",
        k: state.k,
        lambda1: state.coverage.raw,
        lambda3: state.equity.raw,
        target_fraction: state.targetFraction,
        seed: state.seed,
    };
}
/** Serialize the shareable parts of the state into query params. */
export function toQuery(state) {
    const q = new URLSearchParams();
    if (state.regionId)
        q.set("region", state.regionId);
    q.set("cov", state.coverage.level === "custom" ? String(state.coverage.raw) : state.coverage.level);
    q.set("eq", state.equity.level === "custom" ? String(state.equity.raw) : state.equity.level);
    q.set("k", String(state.k));
    q.set("p", String(state.targetFraction));
    q.set("seed", String(state.seed));
    if (state.currentSites.length)
        q.set("sites", state.currentSites.join(","));
    return q.toString();
}
/** Rebuild state from query params (the inverse of toQuery). */
export function fromQuery(query) {
    const q = new URLSearchParams(query);
    const state = initialState();
    state.regionId = q.get("region");
    const cov = q.get("cov");
    if (cov)
        state.coverage = setLevel(COVERAGE_LEVELS, cov);
    const eq = q.get("eq");
    if (eq)
        state.equity = setLevel(EQUITY_LEVELS, eq);
    const k = q.get("k");
    if (k)
        state.k = Math.max(1, Math.round(Number(k)) || 1);
    const p = q.get("p");
    if (p)
        state.targetFraction = Number(p) || 0.1;
    const seed = q.get("seed");
    if (seed)
        state.seed = Math.round(Number(seed)) || 0;
    const sites = q.get("sites");
    if (sites)
        state.currentSites = sites.split(",").filter((s) => s.length > 0);
    return state;
}
