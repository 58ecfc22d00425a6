// Payload shapes as served by the API, schema_version "1".

export interface ErrorBody {
  code: string;
  message: string;
  field_path?: string;
}

export interface PredicatePayload {
  attribute: string;
  op: "==" | "!=" | "<" | "<=" | ">" | ">=";
  value: string | number | boolean;
}

export interface SubgroupMeta {
  label: string;
  group_size: number;
}

export interface SessionQuery {
  name: string;
  group_by: string | null;
  distinct: boolean;
  where: PredicatePayload | null;
  extrapolation: boolean;
  subgroups: SubgroupMeta[];
  sensitive_variables: string[];
}

export interface QueryAllocation {
  epsilon: number;
  locked: boolean;
}

export interface AllocationPayload {
  mode: "manual" | "responsive";
  total_budget: number;
  per_query: Record<string, QueryAllocation>;
  remaining_budget: number;
  notices: string[];
}

export interface SessionPayload {
  schema_version: string;
  id: string;
  dataset: { name: string; n: number };
  queries: SessionQuery[];
  allocation: AllocationPayload;
  finalized: boolean;
  seed_fingerprint: string;
}

export interface BinPayload {
  lower: number;
  upper: number;
  dot_count: number;
}

export interface DotplotPayload {
  dots: number[];
  bins: BinPayload[];
  per_dot_probability: number;
}

export interface CiPayload {
  lower: number;
  upper: number;
  level: number;
}

export type CiSet = Record<string, CiPayload>;

export interface HopFramePayload {
  count: number;
  proportion: number;
  private_cis?: CiSet;
}

export interface HopPayload {
  frame_rate: number;
  frames: HopFramePayload[];
}

export interface WhatifSubgroup {
  label: string;
  group_size: number;
  exact_count: number;
  exact_proportion: number;
  dotplot_count: DotplotPayload;
  dotplot_proportion: DotplotPayload;
  hop: HopPayload;
  nonprivate_cis?: CiSet;
  private_ci_preview?: CiSet;
}

export interface RiskPointPayload {
  epsilon: number;
  risk: number;
}

export interface RiskCurvePayload {
  schema_version: string;
  n: number;
  points: RiskPointPayload[];
}

export interface WhatifPayload {
  schema_version: string;
  query: string;
  epsilon: number;
  extrapolation: boolean;
  frame_rate: number;
  subgroups: WhatifSubgroup[];
  risk_point: RiskPointPayload;
  risk_curve: { points: RiskPointPayload[] };
  remaining_budget: number;
}

export interface ReleaseSubgroup {
  label: string;
  group_size: number;
  released_count: number;
  released_proportion: number;
  private_cis?: CiSet;
}

export interface ReleaseQuery {
  query: string;
  epsilon_spent: number;
  extrapolation: boolean;
  subgroups: ReleaseSubgroup[];
}

export interface ReleaseDocument {
  schema_version: string;
  session_id: string;
  created_at: string;
  dataset: { name: string; n: number };
  queries: ReleaseQuery[];
  overall_risk: RiskPointPayload;
  seed_fingerprint: string;
}

export interface ReleaseResponse {
  schema_version: string;
  already_finalized: boolean;
  document: ReleaseDocument;
}

export interface CreateSessionRequest {
  dataset: string;
  queries: object[];
  total_budget: number;
  seed?: number;
}

export interface WhatifRequest {
  query: string;
  epsilon?: number;
  frames?: number;
}

export type BudgetMutation =
  | { action: "set_epsilon"; query: string; value: number }
  | { action: "toggle_lock"; query: string }
  | { action: "set_mode"; mode: "manual" | "responsive" }
  | { action: "set_total"; total: number };
