export * from './config';
export * from './data';
export * from './model';
export * from './train';
export * from './smokeEval';
export * from './serve';
