/** Wire types for the rulebench HTTP API. */
export {};
