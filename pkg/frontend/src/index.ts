export {
  BridgeOptions,
  CoreError,
  EnvUsageError,
  Reply,
  ServeBridge,
  isUsageError,
} from "./bridge";
export {
  ActionSpace,
  BoxSpace,
  EnvDescriptor,
  ObservationSpace,
  RenderFrame,
  StepInfo,
  StepResult,
  WrappedEnv,
} from "./env";
export { DEFAULT_ENV_ID, MakeOverrides, make } from "./registry";
export {
  ConformanceCheck,
  ConformanceOptions,
  ConformanceReport,
  apiConformanceCheck,
} from "./conformance";
