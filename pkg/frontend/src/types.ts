/** Wire documents exchanged with the run service, mirroring its schema. */

export type Point = [number, number];

export interface ScheduleDoc {
  interval_ms: number;
  start_s: number;
  end_s: number;
}

export interface ChannelDoc {
  range_m: number;
  loss_p: number;
}

export interface MessageDoc {
  size_bytes: number;
  topic?: string;
}

export interface ApDoc {
  position: Point;
  ssid: string;
  bssid: string;
  schedule: ScheduleDoc;
  channel: ChannelDoc;
  message: MessageDoc;
}

export interface TrafficDoc {
  kind: "uniform_flow" | "poisson";
  count: number;
  headway_s?: number;
  rate_per_s?: number;
  speed_kmh_min: number;
  speed_kmh_max: number;
}

export interface ScenarioDoc {
  schema_version: 1;
  seed: number;
  duration_s: number;
  reassembly_policy: "accumulate" | "strict";
  road: { polyline: Point[] };
  traffic: TrafficDoc;
  aps: ApDoc[];
}

export interface VehicleRow {
  id: number;
  spawn_time_s: number;
  speed_mps: number;
  completed_messages: number;
  dropped_messages: number;
  frames_received: number;
  duplicate_frames: number;
  frames_lost: number;
  frames_offered: number;
  per_network: Record<
    string,
    { entered_coverage: boolean; completed_messages: number; dropped_messages: number }
  >;
}

export interface RunResultDoc {
  schema_version: number;
  seed: number;
  duration_s: number;
  scenario_digest: string;
  per_ap: Array<{
    index: number;
    ssid: string;
    frames_sent: number;
    complete_loops: number;
    fragment_count: number;
    message_size_bytes: number;
  }>;
  per_vehicle: VehicleRow[];
  aggregate: {
    total_frames_sent: number;
    total_completed_messages: number;
    frames_received_per_car: number;
    frames_lost_per_car: number;
    vehicle_count: number;
    message_loss_pct: Record<string, number>;
  };
}

export interface RunHandleDoc {
  run_id: string;
  status: "QUEUED" | "RUNNING" | "DONE" | "FAILED";
  submitted_at: number;
  result?: RunResultDoc;
  error?: string;
}

export interface FrameEventDoc {
  time_s: number;
  ap_index: number;
  vehicle_id: number;
  seq_no: number;
  delivered: boolean;
  status: string;
}

export interface EventsDoc {
  run_id: string;
  stride: number;
  total_events: number;
  events: FrameEventDoc[];
}
