// Message shapes of the swarm-control wire protocol (docs/protocol.md).

export type ObjectiveId = "sphere" | "rastrigin" | "griewank" | "schwefel";
export type VariantId = "standard" | "eigencritical" | "adaptive";

export interface SwarmConfigPayload {
    n_particles: number;
    dims: number;
    iterations: number;
    boundary_radius: number;
    objective: ObjectiveId;
    variant: VariantId;
    seed: number;
}

export interface ParamsPayload {
    alpha1: number;
    alpha2: number;
    omega: number;
    omega_top?: number;
    omega_bottom?: number;
    inertia_schedule?: "constant" | "linear";
}

export interface AdaptivePayload {
    epsilon?: number;
    metric?: "particle_dist" | "centroid_dist" | "vel_norm";
    rule?: "dependant" | "independent";
}

export type Command =
    | { type: "configure"; config: SwarmConfigPayload; params: ParamsPayload; adaptive?: AdaptivePayload }
    | { type: "start" }
    | { type: "pause" }
    | { type: "resume" }
    | { type: "reset" }
    | { type: "set_param"; name: "alpha1" | "alpha2" | "omega"; value: number }
    | { type: "set_histogram"; bin_size: number; log_scale: boolean }
    | { type: "dump_stats"; path: string };

export interface HistogramPayload {
    bin_size: number;
    range_min: number;
    range_max: number;
    log_scale: boolean;
    counts: number[];
}

export interface Snapshot {
    type: "snapshot";
    iteration: number;
    best_fitness: number;
    /** null when the last sample overflowed float range */
    msd: number | null;
    params: { alpha1: number; alpha2: number; omega: number };
    running: boolean;
    state: string;
    histogram: HistogramPayload | null;
}

export interface Reply {
    type: "ok" | "error";
    cmd: string | null;
    state: string;
    message?: string;
    records?: number;
}

export type ServerMessage = Snapshot | Reply;

// Interactive bounds mirrored from the service: alpha in [0,4], omega in [0,2].
export const PARAM_BOUNDS = {
    alpha1: { min: 0, max: 4 },
    alpha2: { min: 0, max: 4 },
    omega: { min: 0, max: 2 },
} as const;

export const DEFAULT_PARAMS: ParamsPayload = {
    alpha1: 1.494,
    alpha2: 1.494,
    omega: 0.729,
};
